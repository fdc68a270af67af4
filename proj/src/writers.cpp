#include "grushin/writers.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "grushin/errors.hpp"

namespace grushin {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string profile_csv(const RadialProfile& profile, const std::vector<double>& dh) {
  std::string out = "r,H,D,N,dh_residual\n";
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    out += format_double(profile.radii[i]) + ',' + format_double(profile.H[i]) + ',' +
           format_double(profile.D[i]) + ',' + format_double(profile.N[i]) + ',' +
           format_double(i < dh.size() ? dh[i] : std::nan("")) + '\n';
  }
  return out;
}

std::string field_csv(const ScalarField& u) {
  const GridSpec& g = u.grid();
  const GrushinParams& pr = g.params();
  std::string out;
  for (int i = 0; i < pr.h(); ++i) out += "x" + std::to_string(i + 1) + ',';
  for (int j = 0; j < pr.k(); ++j) out += "y" + std::to_string(j + 1) + ',';
  out += "u\n";
  for (std::size_t n = 0; n < g.size(); ++n) {
    for (double c : g.point(n).flat()) out += format_double(c) + ',';
    out += format_double(u[n]) + '\n';
  }
  return out;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json params_json(const GrushinParams& params) {
  return Json{{"h", params.h()}, {"k", params.k()}, {"alpha", params.alpha()}, {"Q", params.Q()}};
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::io, "cannot write " + path.string());
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) fail(ErrorKind::io, "cannot write " + path.string());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::io, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string manifest_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

OutputLock::OutputLock(const fs::path& dir) : path_(dir / ".lock") {
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0)
    fail(ErrorKind::io, "output directory " + dir.string() + " is locked by another run (" +
                            path_.string() + ")");
  const std::string pid = std::to_string(::getpid()) + "\n";
  if (::write(fd, pid.data(), pid.size()) < 0) {
    ::close(fd);
    fail(ErrorKind::io, "cannot write " + path_.string());
  }
  ::close(fd);
}

OutputLock::~OutputLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

std::vector<ManifestFile> scan_outputs(const fs::path& dir) {
  std::vector<ManifestFile> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name == ".lock" || name == "manifest.json") continue;
    std::ifstream is(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    const std::string bytes = ss.str();
    out.push_back({name, sha256_hex(bytes), bytes.size()});
  }
  std::sort(out.begin(), out.end(),
            [](const ManifestFile& a, const ManifestFile& b) { return a.name < b.name; });
  return out;
}

}  // namespace grushin
