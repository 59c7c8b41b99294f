#include "biorth/moments/cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "biorth/errors.hpp"

namespace biorth::moments {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "biorth-moments/1";

class LockedFd {
 public:
  LockedFd(const std::filesystem::path& p, int flags, int lock) {
    fd_ = ::open(p.c_str(), flags, 0644);
    if (fd_ < 0) {
      throw Error(ErrorCode::InvalidArgument, "cannot open cache file " + p.string() + ": " + std::strerror(errno));
    }
    while (::flock(fd_, lock) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw Error(ErrorCode::InvalidArgument, "cannot lock cache file " + p.string());
      }
    }
  }
  ~LockedFd() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  LockedFd(const LockedFd&) = delete;
  LockedFd& operator=(const LockedFd&) = delete;
  int fd() const noexcept { return fd_; }

 private:
  int fd_ = -1;
};

void write_all(int fd, const std::string& s) {
  std::size_t done = 0;
  while (done < s.size()) {
    const ssize_t w = ::write(fd, s.data() + done, s.size() - done);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::InvalidArgument, std::string("cache write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(w);
  }
}

}  // namespace

MomentCache::MomentCache(std::filesystem::path dir, std::string kernel_hash, long bits)
    : kernel_hash_(std::move(kernel_hash)), bits_(bits) {
  std::filesystem::create_directories(dir);
  file_ = dir / (kernel_hash_ + "-" + std::to_string(bits_) + ".jsonl");
}

std::map<std::pair<std::size_t, std::size_t>, CacheEntry> MomentCache::load() const {
  std::map<std::pair<std::size_t, std::size_t>, CacheEntry> out;
  if (!std::filesystem::exists(file_)) return out;
  LockedFd lock(file_, O_RDONLY, LOCK_SH);
  std::ifstream in(file_);
  std::string line;
  PrecisionScope scope(bits_);
  bool header_ok = false;
  while (std::getline(in, line)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    if (j.contains("format")) {
      header_ok = j.value("format", "") == kFormat && j.value("kernel_hash", "") == kernel_hash_ &&
                  j.value("bits", 0L) == bits_;
      continue;
    }
    if (!header_ok || !j.contains("i") || !j.contains("j")) continue;
    CacheEntry e;
    try {
      e.i = j.at("i").get<std::size_t>();
      e.j = j.at("j").get<std::size_t>();
      if (j.contains("num")) {
        e.rational = Rational(Integer(j.at("num").get<std::string>()), Integer(j.at("den").get<std::string>()));
        e.rational->canonicalize();
      } else if (j.contains("hex_real")) {
        e.real = Real::parse(j.at("hex_real").get<std::string>());
      } else {
        continue;
      }
    } catch (const std::exception&) {
      continue;
    }
    auto& slot = out[{e.i, e.j}];
    if (!slot.rational && e.rational) slot.rational = e.rational;
    if (!slot.real && e.real) slot.real = e.real;
    slot.i = e.i;
    slot.j = e.j;
  }
  return out;
}

void MomentCache::append(const std::vector<CacheEntry>& entries) const {
  if (entries.empty()) return;
  LockedFd lock(file_, O_WRONLY | O_CREAT | O_APPEND, LOCK_EX);
  std::ostringstream buf;
  if (::lseek(lock.fd(), 0, SEEK_END) == 0) {
    buf << json{{"format", kFormat}, {"kernel_hash", kernel_hash_}, {"bits", bits_}}.dump() << '\n';
  }
  for (const auto& e : entries) {
    json j{{"i", e.i}, {"j", e.j}};
    if (e.rational) {
      j["num"] = e.rational->get_num().get_str();
      j["den"] = e.rational->get_den().get_str();
    } else if (e.real) {
      j["hex_real"] = e.real->to_hex();
    } else {
      continue;
    }
    buf << j.dump() << '\n';
  }
  write_all(lock.fd(), buf.str());
  ::fsync(lock.fd());
}

std::optional<std::filesystem::path> cache_dir_from_env() {
  const char* v = std::getenv("BIORTH_CACHE_DIR");
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::filesystem::path(v);
}

}  // namespace biorth::moments
