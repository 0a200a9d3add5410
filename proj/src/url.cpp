#include "curio/url.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <vector>

namespace curio::url {

namespace {

struct Parts {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n\f");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n\f");
  return std::string(s.substr(b, e - b + 1));
}

Parts split(std::string_view s) {
  Parts p;
  if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
  auto colon = s.find(':');
  if (colon != std::string_view::npos && colon > 0 &&
      std::isalpha(static_cast<unsigned char>(s[0])) &&
      std::all_of(s.begin(), s.begin() + static_cast<long>(colon), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
      })) {
    std::string scheme(s.substr(0, colon));
    std::transform(scheme.begin(), scheme.end(), scheme.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    p.scheme = scheme;
    s = s.substr(colon + 1);
  }
  if (s.starts_with("//")) {
    s = s.substr(2);
    auto end = s.find_first_of("/?");
    p.authority = std::string(s.substr(0, end));
    s = end == std::string_view::npos ? std::string_view() : s.substr(end);
  }
  auto q = s.find('?');
  if (q != std::string_view::npos) {
    p.query = std::string(s.substr(q + 1));
    s = s.substr(0, q);
  }
  p.path = std::string(s);
  return p;
}

std::string remove_dot_segments(const std::string& path) {
  std::vector<std::string> out;
  bool absolute = path.starts_with('/');
  std::size_t i = absolute ? 1 : 0;
  bool trailing_slash = false;
  while (i <= path.size()) {
    auto next = path.find('/', i);
    std::string seg = path.substr(i, next == std::string::npos ? std::string::npos : next - i);
    bool last = next == std::string::npos;
    trailing_slash = false;
    if (seg == ".") {
      trailing_slash = last;
    } else if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing_slash = last;
    } else {
      out.push_back(seg);
    }
    if (last) break;
    i = next + 1;
  }
  std::string result = absolute ? "/" : "";
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k) result += '/';
    result += out[k];
  }
  if (trailing_slash && !result.ends_with('/')) result += '/';
  return result;
}

std::string merge(const Parts& base, const std::string& ref_path) {
  if (base.authority && base.path.empty()) return "/" + ref_path;
  auto slash = base.path.rfind('/');
  if (slash == std::string::npos) return ref_path;
  return base.path.substr(0, slash + 1) + ref_path;
}

std::string join(const Parts& p) {
  std::string out;
  if (p.scheme) out += *p.scheme + ":";
  if (p.authority) out += "//" + *p.authority;
  out += p.path;
  if (p.query) out += "?" + *p.query;
  return out;
}

}  // namespace

bool is_absolute(std::string_view candidate) {
  return split(trim(candidate)).scheme.has_value();
}

std::string resolve(std::string_view base_text, std::string_view reference) {
  Parts base = split(trim(base_text));
  Parts ref = split(trim(reference));
  Parts target;
  if (ref.scheme) {
    target = ref;
    target.path = remove_dot_segments(ref.path);
  } else {
    target.scheme = base.scheme;
    if (ref.authority) {
      target.authority = ref.authority;
      target.path = remove_dot_segments(ref.path);
      target.query = ref.query;
    } else {
      target.authority = base.authority;
      if (ref.path.empty()) {
        target.path = base.path;
        target.query = ref.query ? ref.query : base.query;
      } else {
        target.path = ref.path.starts_with('/') ? remove_dot_segments(ref.path)
                                                : remove_dot_segments(merge(base, ref.path));
        target.query = ref.query;
      }
    }
  }
  if (target.authority && target.path.empty()) target.path = "/";
  if (target.authority) {
    std::transform(target.authority->begin(), target.authority->end(), target.authority->begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  }
  return join(target);
}

std::string origin(std::string_view absolute) {
  Parts p = split(trim(absolute));
  if (!p.scheme || !p.authority) return {};
  std::string auth = *p.authority;
  std::transform(auth.begin(), auth.end(), auth.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return *p.scheme + "://" + auth;
}

}  // namespace curio::url
