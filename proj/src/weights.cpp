#include "ppgsmc/weights.hpp"

namespace ppgsmc {

std::string to_string(ResamplingScheme s) {
  return s == ResamplingScheme::Multinomial ? "multinomial" : "systematic";
}

std::optional<ResamplingScheme> parse_scheme(const std::string& s) {
  if (s == "multinomial") return ResamplingScheme::Multinomial;
  if (s == "systematic") return ResamplingScheme::Systematic;
  return std::nullopt;
}

}  // namespace ppgsmc
