#include "spraygrid/errors.hpp"

namespace spraygrid {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return "io";
        case ErrorKind::Schema: return "schema";
        case ErrorKind::Parameter: return "parameter";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Alignment: return "alignment";
        case ErrorKind::Infeasible: return "infeasible";
        case ErrorKind::Solver: return "solver";
        case ErrorKind::Integrity: return "integrity";
    }
    return "unknown";
}

} // namespace spraygrid
