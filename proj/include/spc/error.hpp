#pragma once

#include <stdexcept>
#include <string>

namespace spc {

// Error categories map onto CLI exit codes (see exit_code()).
enum class ErrorKind {
    configuration,   // bad parameters, schema problems
    usage,           // API misuse: grid mismatch, empty lists
    model,           // model cannot produce the requested object
    resolution,      // grid/box too small for the request
    window,          // scan window does not bracket the feature
    no_bound_state,
    numerical,       // solver/propagator failure
    fit_quality,
    study,           // not enough valid points, etc.
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
    ErrorKind kind() const { return kind_; }
private:
    ErrorKind kind_;
};

inline int exit_code(ErrorKind k)
{
    switch (k) {
    case ErrorKind::numerical:
    case ErrorKind::no_bound_state:
    case ErrorKind::fit_quality:
        return 3;
    case ErrorKind::study:
        return 4;
    default:
        return 2;
    }
}

inline const char* kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::usage: return "usage error";
    case ErrorKind::model: return "model error";
    case ErrorKind::resolution: return "resolution error";
    case ErrorKind::window: return "window error";
    case ErrorKind::no_bound_state: return "no bound state";
    case ErrorKind::numerical: return "numerical failure";
    case ErrorKind::fit_quality: return "fit-quality error";
    case ErrorKind::study: return "study error";
    }
    return "error";
}

} // namespace spc
