#include "slicekit/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "slicekit/errors.hpp"

namespace slicekit {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail(line, "key '" + key + "': cannot parse '" + v + "' as a number");
  }
  if (pos != v.size())
    fail(line, "key '" + key + "': trailing characters in '" + v + "'");
  return x;
}

long parse_int(const std::string& v, int line, const std::string& key) {
  std::size_t pos = 0;
  long x = 0;
  try {
    x = std::stol(v, &pos);
  } catch (const std::exception&) {
    fail(line, "key '" + key + "': cannot parse '" + v + "' as an integer");
  }
  if (pos != v.size())
    fail(line, "key '" + key + "': trailing characters in '" + v + "'");
  return x;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void SimConfig::validate() const {
  params.validate();
  if (!(dt > 0.0)) throw ConfigError("config: dt must be > 0");
  if (!(t_end >= 0.0)) throw ConfigError("config: t_end must be >= 0");
  if (output_every < 1) throw ConfigError("config: output.every must be >= 1");
  if (snapshot_every < 0)
    throw ConfigError("config: output.snapshots must be >= 0");
  if (tracer_count < 0) throw ConfigError("config: output.tracers must be >= 0");
  if (!(projection_tol > 0.0))
    throw ConfigError("config: projection_tol must be > 0");
  if (params.Lx != grid.Lx || params.H != grid.H)
    throw ConfigError("config: params domain does not match the grid");
}

SimConfig parse_config(const std::string& text) {
  // Raw values first; the Grid2D constructor validates at the end.
  int nx = 128, nz = 33;
  double Lx = 1.0e6, H = 1.0e4;
  SimConfig cfg;
  std::map<int, LoopSpec> loops;
  bool have_psi = false;
  PsiSpec psi;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int loop_index = -1;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto h = s.find('#'); h != std::string::npos) s.erase(h);
    s = trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      loop_index = -1;
      if (section.rfind("loops.", 0) == 0) {
        loop_index = static_cast<int>(
            parse_int(section.substr(6), line, "loop index"));
        if (loop_index < 0) fail(line, "loop index must be >= 0");
        if (loops.count(loop_index))
          fail(line, "duplicate section [" + section + "]");
        loops[loop_index] = LoopSpec{};
        section = "loops";
      } else if (section != "grid" && section != "params" &&
                 section != "init" && section != "psi" &&
                 section != "output") {
        fail(line, "unknown section [" + section + "]");
      }
      if (section == "psi") {
        if (have_psi) fail(line, "duplicate section [psi]");
        have_psi = true;
      }
      continue;
    }

    auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (val.empty()) fail(line, "key '" + key + "': empty value");
    if (section.empty()) fail(line, "key '" + key + "' outside any section");

    if (section == "grid") {
      if (key == "nx") nx = static_cast<int>(parse_int(val, line, key));
      else if (key == "nz") nz = static_cast<int>(parse_int(val, line, key));
      else if (key == "Lx") Lx = parse_double(val, line, key);
      else if (key == "H") H = parse_double(val, line, key);
      else fail(line, "unknown key '" + key + "' in [grid]");
    } else if (section == "params") {
      if (key == "f") cfg.params.f = parse_double(val, line, key);
      else if (key == "g") cfg.params.gravity = parse_double(val, line, key);
      else if (key == "theta0") cfg.params.theta0 = parse_double(val, line, key);
      else if (key == "s") cfg.params.s = parse_double(val, line, key);
      else if (key == "dt") cfg.dt = parse_double(val, line, key);
      else if (key == "t_end") cfg.t_end = parse_double(val, line, key);
      else fail(line, "unknown key '" + key + "' in [params]");
    } else if (section == "init") {
      if (key == "kind") cfg.init.kind = val;
      else if (key == "N2") cfg.init.N2 = parse_double(val, line, key);
      else if (key == "amplitude") cfg.init.amplitude = parse_double(val, line, key);
      else if (key == "amplitude_inplane")
        cfg.init.amplitude_inplane = parse_double(val, line, key);
      else if (key == "mode") cfg.init.mode = static_cast<int>(parse_int(val, line, key));
      else fail(line, "unknown key '" + key + "' in [init]");
    } else if (section == "loops") {
      LoopSpec& lp = loops[loop_index];
      if (key == "cx") lp.cx = parse_double(val, line, key);
      else if (key == "cz") lp.cz = parse_double(val, line, key);
      else if (key == "rx") lp.rx = parse_double(val, line, key);
      else if (key == "rz") lp.rz = parse_double(val, line, key);
      else if (key == "n") lp.n = static_cast<int>(parse_int(val, line, key));
      else fail(line, "unknown key '" + key + "' in [loops]");
    } else if (section == "psi") {
      if (key == "kind") psi.kind = val;
      else if (key == "amplitude") psi.amplitude = parse_double(val, line, key);
      else if (key == "cx") psi.cx = parse_double(val, line, key);
      else if (key == "cz") psi.cz = parse_double(val, line, key);
      else if (key == "sx") psi.sx = parse_double(val, line, key);
      else if (key == "sz") psi.sz = parse_double(val, line, key);
      else fail(line, "unknown key '" + key + "' in [psi]");
    } else {  // output
      if (key == "every") cfg.output_every = static_cast<int>(parse_int(val, line, key));
      else if (key == "snapshots")
        cfg.snapshot_every = static_cast<int>(parse_int(val, line, key));
      else if (key == "tracers")
        cfg.tracer_count = static_cast<int>(parse_int(val, line, key));
      else if (key == "tracer_seed")
        cfg.tracer_seed = static_cast<unsigned>(parse_int(val, line, key));
      else if (key == "projection_tol")
        cfg.projection_tol = parse_double(val, line, key);
      else fail(line, "unknown key '" + key + "' in [output]");
    }
  }

  cfg.grid = Grid2D(nx, nz, Lx, H);
  cfg.params.Lx = Lx;
  cfg.params.H = H;
  for (const auto& [idx, lp] : loops) cfg.loops.push_back(lp);
  if (have_psi) cfg.psi_bumps.push_back(psi);
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string canonical_config(const SimConfig& cfg) {
  std::ostringstream o;
  o << "[grid]\n"
    << "nx = " << cfg.grid.nx << "\n"
    << "nz = " << cfg.grid.nz << "\n"
    << "Lx = " << fmt(cfg.grid.Lx) << "\n"
    << "H = " << fmt(cfg.grid.H) << "\n";
  o << "[params]\n"
    << "f = " << fmt(cfg.params.f) << "\n"
    << "g = " << fmt(cfg.params.gravity) << "\n"
    << "theta0 = " << fmt(cfg.params.theta0) << "\n"
    << "s = " << fmt(cfg.params.s) << "\n"
    << "dt = " << fmt(cfg.dt) << "\n"
    << "t_end = " << fmt(cfg.t_end) << "\n";
  o << "[init]\n"
    << "kind = " << cfg.init.kind << "\n"
    << "N2 = " << fmt(cfg.init.N2) << "\n"
    << "amplitude = " << fmt(cfg.init.amplitude) << "\n"
    << "amplitude_inplane = " << fmt(cfg.init.amplitude_inplane) << "\n"
    << "mode = " << cfg.init.mode << "\n";
  for (std::size_t i = 0; i < cfg.loops.size(); ++i) {
    const LoopSpec& lp = cfg.loops[i];
    o << "[loops." << i << "]\n"
      << "cx = " << fmt(lp.cx) << "\n"
      << "cz = " << fmt(lp.cz) << "\n"
      << "rx = " << fmt(lp.rx) << "\n"
      << "rz = " << fmt(lp.rz) << "\n"
      << "n = " << lp.n << "\n";
  }
  for (const PsiSpec& b : cfg.psi_bumps) {
    o << "[psi]\n"
      << "kind = " << b.kind << "\n"
      << "amplitude = " << fmt(b.amplitude) << "\n"
      << "cx = " << fmt(b.cx) << "\n"
      << "cz = " << fmt(b.cz) << "\n"
      << "sx = " << fmt(b.sx) << "\n"
      << "sz = " << fmt(b.sz) << "\n";
  }
  o << "[output]\n"
    << "every = " << cfg.output_every << "\n"
    << "snapshots = " << cfg.snapshot_every << "\n"
    << "tracers = " << cfg.tracer_count << "\n"
    << "tracer_seed = " << cfg.tracer_seed << "\n"
    << "projection_tol = " << fmt(cfg.projection_tol) << "\n";
  return o.str();
}

std::string config_digest(const SimConfig& cfg) {
  const std::string text = canonical_config(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace slicekit
