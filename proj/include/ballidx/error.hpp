#pragma once

#include <stdexcept>
#include <string>

namespace ballidx {

/// Every failure surfaced by the library is an Error carrying a coarse kind,
/// which the CLI maps onto its exit codes.
class Error : public std::runtime_error {
public:
    enum class Kind {
        Config,   ///< invalid parameters or flags
        Data,     ///< malformed input files or inconsistent dimensions
        Domain,   ///< argument outside a mathematical operation's domain
        Internal  ///< broken invariant; indicates a bug
    };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

inline Error config_error(const std::string& what) { return Error(Error::Kind::Config, what); }
inline Error data_error(const std::string& what) { return Error(Error::Kind::Data, what); }
inline Error domain_error(const std::string& what) { return Error(Error::Kind::Domain, what); }
inline Error internal_error(const std::string& what) { return Error(Error::Kind::Internal, what); }

} // namespace ballidx
