#include "repayrisk/config.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace repayrisk::config {

namespace {

std::string trim(const std::string& s) {
    const auto from = s.find_first_not_of(" \t\r");
    if (from == std::string::npos) return "";
    const auto to = s.find_last_not_of(" \t\r");
    return s.substr(from, to - from + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': not a number: '" + value + "'");
    }
    if (consumed != value.size() || !std::isfinite(v)) {
        throw std::invalid_argument("config key '" + key + "': not a number: '" + value + "'");
    }
    return v;
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_number(key, value);
    const int i = static_cast<int>(std::lround(v));
    if (std::fabs(v - i) > 1e-12) {
        throw std::invalid_argument("config key '" + key + "': must be an integer");
    }
    return i;
}

class KeyMap {
  public:
    void insert(const std::string& key, const std::string& value) {
        if (!entries_.emplace(key, value).second) {
            throw std::invalid_argument("config key '" + key + "' given twice");
        }
    }
    std::string take(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) {
            throw std::invalid_argument("config key '" + key + "' is missing");
        }
        std::string v = it->second;
        entries_.erase(it);
        return v;
    }
    bool contains(const std::string& key) const { return entries_.count(key) > 0; }
    void reject_leftovers() const {
        if (!entries_.empty()) {
            throw std::invalid_argument("config key '" + entries_.begin()->first +
                                        "' is not recognized");
        }
    }

  private:
    std::map<std::string, std::string> entries_;
};

}  // namespace

RunConfig RunConfig::parse(std::istream& in) {
    KeyMap keys;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "config line " << lineno << ": expected 'key = value', got '" << line << "'";
            throw std::invalid_argument(msg.str());
        }
        keys.insert(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    const std::string kind = keys.take("arrivals.kind");
    model::ArrivalLaw arrivals;
    if (kind == "exponential") {
        arrivals = model::ExponentialArrivals{parse_number("arrivals.lambda", keys.take("arrivals.lambda"))};
    } else if (kind == "erlang") {
        arrivals = model::ErlangArrivals{parse_int("arrivals.k", keys.take("arrivals.k")),
                                         parse_number("arrivals.lambda", keys.take("arrivals.lambda"))};
    } else if (kind == "randomized_exponential") {
        arrivals = model::RandomizedExponentialArrivals{
            parse_number("arrivals.k", keys.take("arrivals.k")),
            parse_number("arrivals.theta", keys.take("arrivals.theta"))};
    } else {
        throw std::invalid_argument(
            "config key 'arrivals.kind': expected exponential, erlang or "
            "randomized_exponential, got '" + kind + "'");
    }
    const double alpha = parse_number("severity.alpha", keys.take("severity.alpha"));
    const double u = parse_number("loan.u", keys.take("loan.u"));
    const double c = parse_number("loan.c", keys.take("loan.c"));
    keys.reject_leftovers();

    RunConfig cfg{model::DisasterModel::make(arrivals, model::SeverityLaw::exponential(alpha)),
                  model::LoanSpec::make(u, c)};
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config file not readable: " + path);
    }
    return parse(in);
}

}  // namespace repayrisk::config
