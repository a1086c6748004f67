#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kcat/types.hpp"

namespace kcat {

/// One named verification with its residual. Failed checks carry a witness
/// element so reports stay reproducible evidence, not just verdicts.
struct CheckRecord {
  std::string name;
  bool pass = true;
  double residual = 0.0;
  std::optional<Matrix> witness;
  std::string detail;
};

struct Report {
  std::string command;
  std::string inputs_digest;
  std::vector<CheckRecord> checks;
  double duration_ms = 0.0;  // stderr only; kept out of the serialized bytes

  bool pass() const;
  const CheckRecord* first_failure() const;
  double max_residual() const;

  /// Records residual <= bound as a pass, anything else as a fail.
  CheckRecord& add(std::string name, double residual, double bound);
  CheckRecord& add_bool(std::string name, bool ok, std::string detail = {});
  void merge(const Report& other, const std::string& prefix = {});
};

/// ConstructionError that carries the failed certificate report.
class CertificateError : public ConstructionError {
 public:
  CertificateError(const std::string& msg, Report report)
      : ConstructionError(msg), report_(std::move(report)) {}
  const Report& report() const { return report_; }

 private:
  Report report_;
};

}  // namespace kcat
