#ifndef SIEVE_ERROR_HPP
#define SIEVE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sieve {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sieve

#endif // SIEVE_ERROR_HPP
