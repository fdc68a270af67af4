#pragma once

// Byte-stable serialization: CSV with 17 significant digits and Unix newlines, JSON reports
// with keys params / results / checks / provenance, SHA-256 manifests and an output lock.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "grushin/frequency.hpp"
#include "grushin/geometry.hpp"
#include "grushin/grid.hpp"

namespace grushin {

using Json = nlohmann::ordered_json;

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double v);

/// Header r,H,D,N,dh_residual. dh may be empty (fewer than 5 radii), giving "nan".
std::string profile_csv(const RadialProfile& profile, const std::vector<double>& dh);

/// Node coordinates followed by the value: x1,..,y1,..,u.
std::string field_csv(const ScalarField& u);

std::string dump_json(const Json& j);
Json params_json(const GrushinParams& params);

/// Writes bytes exactly (binary mode). Throws an io error on failure.
void write_file(const std::filesystem::path& path, const std::string& bytes);

std::string sha256_hex(const std::string& bytes);

/// ISO-8601 UTC time from SOURCE_DATE_EPOCH when set, otherwise the current time.
std::string manifest_timestamp();

/// Exclusive `.lock` file in an output directory, removed on destruction.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
};

struct ManifestFile {
  std::string name;
  std::string sha256;
  std::size_t bytes;
};

/// Digest record for every regular file in dir except the lock and the manifest itself.
std::vector<ManifestFile> scan_outputs(const std::filesystem::path& dir);

}  // namespace grushin
