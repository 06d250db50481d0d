#include <sstream>

#include "chr/analysis.hpp"

namespace chr {

ComplexityReport complexity_bound(const Program& p,
                                  std::optional<std::size_t> derivation_length) {
  ComplexityReport r;
  for (const Rule& rule : p.rules) r.heads = std::max(r.heads, rule.head_count());
  r.bound = r.heads == 1 ? "O(D)" : "O(D^" + std::to_string(r.heads) + ")";
  r.measured = derivation_length;
  if (derivation_length) {
    Integer n = 1;
    for (std::size_t i = 0; i < r.heads; ++i) n *= Integer(*derivation_length);
    r.numeric = n;
  }
  return r;
}

std::string format_report(const ComplexityReport& r) {
  std::ostringstream os;
  os << "h=" << r.heads << "\n";
  os << "bound: " << r.bound << "\n";
  if (r.measured) os << "D=" << *r.measured << "\n";
  if (r.numeric) os << "D^h=" << *r.numeric << "\n";
  return os.str();
}

}  // namespace chr
