#include "levelmass/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "levelmass/errors.hpp"

namespace levelmass {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

static std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw ConfigError("cannot open for writing: " + path.string());
    return os;
}

void write_field_block(const std::filesystem::path& base, const FieldHeader& hdr,
                       const std::vector<double>& data) {
    static_assert(std::endian::native == std::endian::little,
                  "field blocks are little-endian");
    const std::size_t expect = static_cast<std::size_t>(hdr.N) * hdr.N * hdr.N;
    if (data.size() != expect)
        throw std::invalid_argument("write_field_block: data size != N^3");
    {
        auto os = open_out(base.string() + ".hdr");
        os << "L = " << format_g17(hdr.L) << "\n";
        os << "N = " << hdr.N << "\n";
        os << "pole = " << format_g17(hdr.pole[0]) << ',' << format_g17(hdr.pole[1])
           << ',' << format_g17(hdr.pole[2]) << "\n";
        os << "kind = " << hdr.kind << "\n";
        os << "m = " << format_g17(hdr.mass) << "\n";
        os << "a = " << format_g17(hdr.smoothing_a) << "\n";
    }
    auto os = open_out(base.string() + ".f64", true);
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(double)));
}

std::pair<FieldHeader, std::vector<double>> read_field_block(
    const std::filesystem::path& base) {
    FieldHeader hdr;
    std::ifstream hs(base.string() + ".hdr");
    if (!hs) throw ConfigError("cannot open field header: " + base.string() + ".hdr");
    std::string line;
    while (std::getline(hs, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        const auto strip = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
        };
        strip(key);
        strip(val);
        if (key == "L") hdr.L = std::stod(val);
        else if (key == "N") hdr.N = std::stoi(val);
        else if (key == "kind") hdr.kind = val;
        else if (key == "m") hdr.mass = std::stod(val);
        else if (key == "a") hdr.smoothing_a = std::stod(val);
        else if (key == "pole") {
            std::replace(val.begin(), val.end(), ',', ' ');
            std::istringstream ss(val);
            ss >> hdr.pole[0] >> hdr.pole[1] >> hdr.pole[2];
        }
    }
    if (hdr.N <= 0) throw ConfigError("field header: missing or bad N");
    const std::size_t n = static_cast<std::size_t>(hdr.N) * hdr.N * hdr.N;
    std::vector<double> data(n);
    std::ifstream bs(base.string() + ".f64", std::ios::binary);
    if (!bs) throw ConfigError("cannot open field block: " + base.string() + ".f64");
    bs.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (static_cast<std::size_t>(bs.gcount()) != n * sizeof(double))
        throw ConfigError("field block truncated: " + base.string() + ".f64");
    return {hdr, std::move(data)};
}

void write_off_mesh(const std::filesystem::path& path, const ExtractedSurface& surf) {
    auto os = open_out(path);
    os << "OFF\n";
    os << surf.vertices.size() << ' ' << surf.triangles.size() << " 0\n";
    for (const auto& v : surf.vertices)
        os << format_g17(v[0]) << ' ' << format_g17(v[1]) << ' ' << format_g17(v[2])
           << "\n";
    for (const auto& t : surf.triangles)
        os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
}

void write_sweep_table(const std::filesystem::path& path, const MonotonicityReport& rep) {
    auto os = open_out(path);
    os << "t,level,F,flux,int_grad2,int_gradH,gb_deficit,grad_term,scalar_term,"
          "traceless_term,sphere_dev\n";
    for (const auto& s : rep.samples) {
        if (s.skipped) {
            os << format_g17(s.t) << ',' << format_g17(s.level)
               << ",skipped: " << s.skip_reason << "\n";
            continue;
        }
        const auto& d = s.derivative_terms;
        os << format_g17(s.t) << ',' << format_g17(s.level) << ','
           << format_g17(s.F_value) << ',' << format_g17(s.flux) << ','
           << format_g17(s.int_grad2) << ',' << format_g17(s.int_gradH) << ','
           << format_g17(d.gauss_bonnet_deficit) << ',' << format_g17(d.grad_term)
           << ',' << format_g17(d.scalar_term) << ',' << format_g17(d.traceless_term)
           << ',' << format_g17(d.sphere_deviation) << "\n";
    }
}

void write_penrose_table(const std::filesystem::path& path,
                         const std::vector<PenroseRow>& rows) {
    auto os = open_out(path);
    os << "p,cap_p,c_p,beta_p,two_m,horizon_area,sqrt_area_over_16pi\n";
    for (const auto& r : rows)
        os << format_g17(r.p) << ',' << format_g17(r.cap_p) << ',' << format_g17(r.c_p)
           << ',' << format_g17(r.beta_p) << ',' << format_g17(r.two_m) << ','
           << format_g17(r.horizon_area) << ',' << format_g17(r.sqrt_area_over_16pi)
           << "\n";
}

void write_identity_table(const std::filesystem::path& path,
                          const std::vector<IdentityRow>& rows) {
    auto os = open_out(path);
    os << "r,tag,lhs,rhs,relerr\n";
    for (const auto& r : rows)
        os << format_g17(r.r) << ',' << r.tag << ',' << format_g17(r.lhs) << ','
           << format_g17(r.rhs) << ',' << format_g17(r.relerr) << "\n";
}

void write_summary(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>& fields,
                   const std::vector<AssertRecord>& asserts) {
    auto os = open_out(path);
    for (const auto& [k, v] : fields) os << k << " = " << v << "\n";
    for (const auto& a : asserts) {
        os << "assert " << a.name << " = " << (a.pass ? "pass" : "FAIL")
           << " (measured = " << format_g17(a.measured)
           << ", tol = " << format_g17(a.tolerance) << ")";
        if (!a.note.empty()) os << " # " << a.note;
        os << "\n";
    }
}

} // namespace levelmass
