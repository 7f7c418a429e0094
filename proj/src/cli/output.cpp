#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "fsg/cli.hpp"
#include "fsg/errors.hpp"
#include "json.hpp"

namespace fsg::cli {

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string render(const Table& t, Format f) {
  if (f == Format::Csv) {
    std::string s;
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
      if (k) s += ',';
      s += t.columns[k];
    }
    s += '\n';
    for (const auto& row : t.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) s += ',';
        s += number(row[k]);
      }
      s += '\n';
    }
    return s;
  }
  nlohmann::ordered_json j;
  j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) j["meta"][k] = v;
  j["columns"] = t.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) j["rows"].push_back(row);
  return j.dump() + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot rename onto " + path + ": " + ec.message());
  }
}

}  // namespace fsg::cli
