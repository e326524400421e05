#include "surfns/io.hpp"

#include <cstdio>
#include <sstream>
#include <vector>

#include "surfns/errors.hpp"

namespace surfns {

namespace {

void write_header(std::ofstream& out, const SurfaceAtlas& atlas, int ncomp) {
    const Chart& ch = atlas.charts[0];
    out << "SURFNS1 " << kind_name(atlas.kind) << ' ' << atlas.n_charts() << ' ' << ch.n1 << ' '
        << ch.n2 << ' ' << ncomp << '\n';
}

std::ifstream open_checked(const std::string& path, const SurfaceAtlas& atlas, int want_comp) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open snapshot: " + path);
    std::string line;
    std::getline(in, line);
    std::istringstream hs(line);
    std::string magic, kind;
    int ncharts = 0, n1 = 0, n2 = 0, ncomp = 0;
    hs >> magic >> kind >> ncharts >> n1 >> n2 >> ncomp;
    if (magic != "SURFNS1") throw config_error("bad snapshot magic in " + path);
    const Chart& ch = atlas.charts[0];
    if (kind != kind_name(atlas.kind) || ncharts != atlas.n_charts() || n1 != ch.n1 ||
        n2 != ch.n2 || ncomp != want_comp)
        throw config_error("snapshot " + path + " does not match the atlas (" + line + ")");
    return in;
}

} // namespace

void save_field(const std::string& path, const ScalarField& f) {
    const SurfaceAtlas& atlas = *f.atlas;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write snapshot: " + path);
    write_header(out, atlas, 1);
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const Chart& ch = atlas.charts[c];
        std::vector<double> buf;
        buf.reserve(static_cast<std::size_t>(ch.n1) * ch.n2);
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) buf.push_back(f.data[c][ch.idx(i, j)]);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size() * sizeof(double)));
    }
    if (!out) throw numerical_error("short write on snapshot: " + path);
}

void save_field(const std::string& path, const VectorField& f) {
    const SurfaceAtlas& atlas = *f.atlas;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write snapshot: " + path);
    write_header(out, atlas, 3);
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const Chart& ch = atlas.charts[c];
        std::vector<double> buf;
        buf.reserve(static_cast<std::size_t>(ch.n1) * ch.n2 * 3);
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const Vec3& v = f.data[c][ch.idx(i, j)];
                buf.push_back(v.x());
                buf.push_back(v.y());
                buf.push_back(v.z());
            }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size() * sizeof(double)));
    }
    if (!out) throw numerical_error("short write on snapshot: " + path);
}

ScalarField load_scalar(const std::string& path, const SurfaceAtlas& atlas) {
    std::ifstream in = open_checked(path, atlas, 1);
    ScalarField f = make_scalar(atlas);
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const Chart& ch = atlas.charts[c];
        std::vector<double> buf(static_cast<std::size_t>(ch.n1) * ch.n2);
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(double)));
        if (!in) throw config_error("truncated snapshot: " + path);
        std::size_t q = 0;
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) f.data[c][ch.idx(i, j)] = buf[q++];
    }
    halo_exchange(f);
    return f;
}

VectorField load_vector(const std::string& path, const SurfaceAtlas& atlas, bool tangent) {
    std::ifstream in = open_checked(path, atlas, 3);
    VectorField f = make_vector(atlas, tangent);
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const Chart& ch = atlas.charts[c];
        std::vector<double> buf(static_cast<std::size_t>(ch.n1) * ch.n2 * 3);
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(double)));
        if (!in) throw config_error("truncated snapshot: " + path);
        std::size_t q = 0;
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                f.data[c][ch.idx(i, j)] = Vec3(buf[q], buf[q + 1], buf[q + 2]);
                q += 3;
            }
    }
    halo_exchange(f);
    return f;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header) : out_(path) {
    if (!out_) throw config_error("cannot write csv: " + path);
    out_ << header << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
    char buf[32];
    bool first = true;
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (!first) out_ << ',';
        out_ << buf;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::raw(const std::string& line) { out_ << line << '\n'; }

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot hash missing file: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    return h;
}

void save_vtk(const std::string& path, const SurfaceAtlas& atlas, const VectorField* velocity,
              const ScalarField* pressure) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write vtk: " + path);
    std::vector<std::pair<int, int>> nodes; // (chart, k)
    for (int c = 0; c < atlas.n_charts(); ++c)
        for (int k = 0; k < atlas.charts[c].size(); ++k)
            if (atlas.geom[c].active(k)) nodes.emplace_back(c, k);

    out << "# vtk DataFile Version 3.0\nsurface snapshot\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << nodes.size() << " double\n";
    char buf[128];
    for (auto [c, k] : nodes) {
        const Vec3& x = atlas.geom[c].x[k];
        std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", x.x(), x.y(), x.z());
        out << buf;
    }
    out << "VERTICES " << nodes.size() << ' ' << 2 * nodes.size() << '\n';
    for (std::size_t i = 0; i < nodes.size(); ++i) out << "1 " << i << '\n';
    out << "POINT_DATA " << nodes.size() << '\n';
    if (pressure) {
        out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
        for (auto [c, k] : nodes) {
            std::snprintf(buf, sizeof buf, "%.9g\n", pressure->data[c][k]);
            out << buf;
        }
    }
    if (velocity) {
        out << "VECTORS velocity double\n";
        for (auto [c, k] : nodes) {
            const Vec3& v = velocity->data[c][k];
            std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", v.x(), v.y(), v.z());
            out << buf;
        }
    }
}

} // namespace surfns
