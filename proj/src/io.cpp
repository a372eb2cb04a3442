#include "pucci/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pucci {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(const std::string& data) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

namespace {

void append_number(std::ostringstream& os, double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    os << buf;
}

}  // namespace

std::string radial_profile_csv(const RadialProfile& prof, const std::string& header) {
    std::ostringstream os;
    os << header;
    os << "r,v,dv\n";
    for (std::size_t i = 0; i < prof.size(); ++i) {
        append_number(os, prof.radii[i]);
        os << ',';
        append_number(os, prof.values[i]);
        os << ',';
        append_number(os, prof.derivs[i]);
        os << '\n';
    }
    return os.str();
}

std::string grid_solution_csv(const DiscreteSolution& sol, const std::string& header) {
    const auto& g = sol.grid;
    std::ostringstream os;
    os << header;
    os << "r,theta,u\n";
    for (int i = 0; i < g.nr; ++i) {
        for (int j = 0; j < g.ntheta; ++j) {
            append_number(os, g.radius(i, j));
            os << ',';
            append_number(os, g.theta[j]);
            os << ',';
            append_number(os, sol.values[g.index(i, j)]);
            os << '\n';
        }
    }
    for (int j = 0; j < g.ntheta; ++j) {
        append_number(os, g.rho[j]);
        os << ',';
        append_number(os, g.theta[j]);
        os << ',';
        append_number(os, sol.values[g.boundary_index(j)]);
        os << '\n';
    }
    return os.str();
}

}  // namespace pucci
