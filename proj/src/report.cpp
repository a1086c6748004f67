#include "kcat/report.hpp"

#include <algorithm>

namespace kcat {

bool Report::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckRecord& c) { return c.pass; });
}

const CheckRecord* Report::first_failure() const {
  for (const auto& c : checks) {
    if (!c.pass) return &c;
  }
  return nullptr;
}

double Report::max_residual() const {
  double worst = 0.0;
  for (const auto& c : checks) worst = std::max(worst, c.residual);
  return worst;
}

CheckRecord& Report::add(std::string name, double residual, double bound) {
  CheckRecord rec;
  rec.name = std::move(name);
  rec.residual = residual;
  rec.pass = residual <= bound;
  checks.push_back(std::move(rec));
  return checks.back();
}

CheckRecord& Report::add_bool(std::string name, bool ok, std::string detail) {
  CheckRecord rec;
  rec.name = std::move(name);
  rec.pass = ok;
  rec.residual = ok ? 0.0 : 1.0;
  rec.detail = std::move(detail);
  checks.push_back(std::move(rec));
  return checks.back();
}

void Report::merge(const Report& other, const std::string& prefix) {
  for (const auto& c : other.checks) {
    checks.push_back(c);
    if (!prefix.empty()) checks.back().name = prefix + c.name;
  }
}

}  // namespace kcat
