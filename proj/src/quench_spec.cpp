#include "tfim/quench_spec.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tfim/errors.hpp"

namespace tfim {

Epsilon Epsilon::from_field(double h_f) {
    if (!(h_f - 1.0 > -1.0))
        throw DomainError("epsilon must be > -1 (h_f must be positive)");
    return Epsilon{h_f - 1.0};
}

const QuenchSpec& validate_spec(const QuenchSpec& spec) {
    if (spec.n < 2) throw ValidationError("N must be >= 2");
    if (spec.n % 2 != 0) throw ValidationError("N must be even");
    if (!(spec.j > 0.0) || !std::isfinite(spec.j))
        throw ValidationError("J must be positive");
    if (!(spec.h_i > 0.0) || !std::isfinite(spec.h_i))
        throw ValidationError("h_i must be positive");
    if (!(spec.h_f >= 0.0) || !std::isfinite(spec.h_f))
        throw ValidationError("h_f must be nonnegative");
    if (spec.t_grid.empty()) throw ValidationError("t_grid must be non-empty");
    double prev = -1.0;
    for (double t : spec.t_grid) {
        if (!std::isfinite(t) || t < 0.0)
            throw ValidationError("t_grid entries must be finite and >= 0");
        if (t <= prev) throw ValidationError("t_grid must be strictly increasing");
        prev = t;
    }
    return spec;
}

std::vector<double> uniform_grid(double t_start, double t_end, double t_step) {
    if (!(t_step > 0.0)) throw ValidationError("t_step must be positive");
    if (t_end < t_start) throw ValidationError("t_end must be >= t_start");
    std::vector<double> out;
    long nsteps = std::lround((t_end - t_start) / t_step);
    for (long i = 0; i <= nsteps; ++i) {
        double t = t_start + static_cast<double>(i) * t_step;
        if (t > t_end + 0.5 * t_step) break;
        out.push_back(t);
    }
    return out;
}

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("spec file: bad numeric value for key '" + key + "': " + s);
    }
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

QuenchSpec parse_spec(std::istream& in) {
    QuenchSpec spec;
    spec.t_grid.clear();
    bool have_list = false, have_start = false, have_end = false, have_step = false;
    double t_start = 0, t_end = 0, t_step = 0;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("spec file: expected key=value, got: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "n") {
            double v = parse_double(val, key);
            if (v != std::floor(v)) throw ValidationError("N must be an integer");
            spec.n = static_cast<int>(v);
        } else if (key == "j") {
            spec.j = parse_double(val, key);
        } else if (key == "h_i") {
            spec.h_i = parse_double(val, key);
        } else if (key == "h_f") {
            spec.h_f = parse_double(val, key);
        } else if (key == "t_list") {
            have_list = true;
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ','))
                spec.t_grid.push_back(parse_double(trim(item), key));
        } else if (key == "t_start") {
            have_start = true;
            t_start = parse_double(val, key);
        } else if (key == "t_end") {
            have_end = true;
            t_end = parse_double(val, key);
        } else if (key == "t_step") {
            have_step = true;
            t_step = parse_double(val, key);
        } else {
            throw ValidationError("spec file: unknown key '" + key + "'");
        }
    }
    if (have_list && (have_start || have_end || have_step))
        throw ValidationError("spec file: t_list and t_start/t_end/t_step are mutually exclusive");
    if (!have_list) {
        if (!(have_start && have_end && have_step))
            throw ValidationError("spec file: need t_list or all of t_start,t_end,t_step");
        spec.t_grid = uniform_grid(t_start, t_end, t_step);
    }
    validate_spec(spec);
    return spec;
}

QuenchSpec parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open spec file: " + path);
    return parse_spec(in);
}

std::string serialize_spec(const QuenchSpec& spec) {
    std::string out;
    out += "n = " + std::to_string(spec.n) + "\n";
    out += "j = " + fmt_double(spec.j) + "\n";
    out += "h_i = " + fmt_double(spec.h_i) + "\n";
    out += "h_f = " + fmt_double(spec.h_f) + "\n";
    out += "t_list = ";
    for (std::size_t i = 0; i < spec.t_grid.size(); ++i) {
        if (i) out += ",";
        out += fmt_double(spec.t_grid[i]);
    }
    out += "\n";
    return out;
}

void write_spec_file(const QuenchSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write spec file: " + path);
    out << serialize_spec(spec);
}

std::uint64_t spec_hash(const QuenchSpec& spec) {
    std::string s = serialize_spec(spec);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace tfim
