#include "nsdg/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nsdg {

PenaltyConfig RunConfig::penalties() const {
  PenaltyConfig pen = PenaltyConfig::defaults(k);
  if (sigma > 0.0) pen.sigma = sigma;
  if (sigma_tilde > 0.0) pen.sigma_tilde = sigma_tilde;
  pen.delta = delta;
  return pen;
}

void RunConfig::validate() const {
  if (command != "simulate" && command != "study" && command != "verify-forms")
    throw std::invalid_argument("config key 'command': expected simulate, study, or verify-forms");
  if (k < 1) throw std::invalid_argument("config key 'k': must be >= 1");
  if (n < 1) throw std::invalid_argument("config key 'n': must be >= 1");
  if (mu <= 0.0) throw std::invalid_argument("config key 'mu': must be > 0");
  if (delta <= 0.0) throw std::invalid_argument("config key 'delta': must be > 0");
  if (T <= 0.0) throw std::invalid_argument("config key 'T': must be > 0");
  if (tau_c <= 0.0) throw std::invalid_argument("config key 'tau_c': must be > 0");
  if (tau_mode != "h2" && tau_mode != "h" && tau_mode != "fixed")
    throw std::invalid_argument("config key 'tau_mode': expected h2, h, or fixed");
  if (trials < 1) throw std::invalid_argument("config key 'trials': must be >= 1");
  if (command == "study") {
    if (levels.empty()) throw std::invalid_argument("config key 'levels': must be nonempty for study");
    for (int lv : levels)
      if (lv < 1) throw std::invalid_argument("config key 'levels': entries must be >= 1");
  }
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config file not readable: " + path);

  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto sep = line.find('=');
    if (sep == std::string::npos) sep = line.find(':');
    if (sep == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, sep));
    const std::string value = trim(line.substr(sep + 1));

    static const std::vector<std::string> known = {
        "command", "k",        "n",     "levels", "mu",   "sigma",      "sigma_tilde",
        "delta",   "T",        "tau_mode", "tau_c", "case", "output_dir", "seed",
        "trials"};
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown config key '" + key + "'");

    try {
      if (key == "command") base.command = value;
      else if (key == "k") base.k = std::stoi(value);
      else if (key == "n") base.n = std::stoi(value);
      else if (key == "levels") base.levels = parse_int_list(value);
      else if (key == "mu") base.mu = std::stod(value);
      else if (key == "sigma") base.sigma = std::stod(value);
      else if (key == "sigma_tilde") base.sigma_tilde = std::stod(value);
      else if (key == "delta") base.delta = std::stod(value);
      else if (key == "T") base.T = std::stod(value);
      else if (key == "tau_mode") base.tau_mode = value;
      else if (key == "tau_c") base.tau_c = std::stod(value);
      else if (key == "case") base.case_name = value;
      else if (key == "output_dir") base.output_dir = value;
      else if (key == "seed") base.seed = std::stoull(value);
      else if (key == "trials") base.trials = std::stoi(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("config key '" + key + "': cannot parse value '" + value +
                                  "'");
    }
  }
  return base;
}

}  // namespace nsdg
