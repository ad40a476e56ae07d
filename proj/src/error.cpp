#include "mmgof/error.hpp"

namespace mmgof {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MalformedInput: return "malformed input";
        case ErrorKind::SelfLoop: return "self-loop";
        case ErrorKind::Shape: return "shape error";
        case ErrorKind::Value: return "value error";
        case ErrorKind::DataIntegrity: return "data integrity error";
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::Configuration: return "configuration error";
        case ErrorKind::Capacity: return "capacity error";
        case ErrorKind::Io: return "I/O error";
    }
    return "error";
}

}  // namespace mmgof
