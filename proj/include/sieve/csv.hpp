#ifndef SIEVE_CSV_HPP
#define SIEVE_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace sieve {

// Minimal RFC-4180-style CSV: fields with commas, quotes or newlines are
// wrapped in double quotes, embedded quotes doubled.
std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

// Splits one logical CSV record. Throws on an unterminated quote.
std::vector<std::string> csv_split(std::string_view line);

// False while a physical line leaves a quoted field open (the record
// continues on the next line).
bool csv_record_complete(std::string_view partial);

} // namespace sieve

#endif // SIEVE_CSV_HPP
