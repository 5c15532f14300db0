#include "multinorm/io.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include <sstream>
#include <stdexcept>

namespace multinorm {

namespace {
constexpr char kMagic[8] = {'M', 'N', 'G', 'B', '0', '0', '0', '1'};
}

void save_grid_binary(const SampledFunction& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(kMagic, 8);
    const auto& g = f.geometry();
    const std::uint32_t rank = (std::uint32_t)g.rank();
    out.write(reinterpret_cast<const char*>(&rank), 4);
    for (int h = 0; h < g.rank(); ++h) {
        const std::int32_t n2 = g.log2n[h], p2 = g.period_log2[h];
        out.write(reinterpret_cast<const char*>(&n2), 4);
        out.write(reinterpret_cast<const char*>(&p2), 4);
    }
    out.write(reinterpret_cast<const char*>(f.samples().data()),
              (std::streamsize)(f.samples().size() * sizeof(cplx)));
}

SampledFunction load_grid_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("bad grid file: " + path);
    std::uint32_t rank = 0;
    in.read(reinterpret_cast<char*>(&rank), 4);
    GridGeometry g;
    for (std::uint32_t h = 0; h < rank; ++h) {
        std::int32_t n2 = 0, p2 = 0;
        in.read(reinterpret_cast<char*>(&n2), 4);
        in.read(reinterpret_cast<char*>(&p2), 4);
        g.log2n.push_back(n2);
        g.period_log2.push_back(p2);
    }
    std::vector<cplx> samples(g.total());
    in.read(reinterpret_cast<char*>(samples.data()),
            (std::streamsize)(samples.size() * sizeof(cplx)));
    if (!in) throw std::runtime_error("truncated grid file: " + path);
    return SampledFunction(g, std::move(samples));
}

std::string scales_csv(const ScaleLattice& lat, long long bound) {
    std::ostringstream out;
    out << "L,D,S,tube_lo,tube_hi\n";
    for (const auto& sc : lat.enumerate(bound)) {
        out << '"';
        for (std::size_t i = 0; i < sc.L.size(); ++i) out << (i ? " " : "") << sc.L[i];
        out << "\",\"";
        for (std::size_t i = 0; i < sc.D.size(); ++i) out << (i ? " " : "") << sc.D[i] + 1;
        out << "\",\"" << sc.S.to_string() << "\",\"";
        Tube t = lat.tube(sc);
        for (std::size_t i = 0; i < t.lo.size(); ++i) out << (i ? " " : "") << t.lo[i].to_string();
        out << "\",\"";
        for (std::size_t i = 0; i < t.hi.size(); ++i) out << (i ? " " : "") << t.hi[i].to_string();
        out << "\"\n";
    }
    return out.str();
}

std::string decomposition_svg_2d(const ScaleLattice& lat, long long bound) {
    if (lat.structure().n() != 2)
        throw std::invalid_argument("decomposition panel requires two factors");
    const double px = 60.0;  // pixels per unit of t
    const double W = (double)(bound + 2) * px, H = W;
    auto X = [&](double t1) { return 40.0 + t1 * px; };
    auto Y = [&](double t2) { return H - 40.0 - t2 * px; };
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << (int)(W + 80) << "' height='"
        << (int)(H + 20) << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    // Tubes.
    for (const auto& sc : lat.enumerate(bound)) {
        Tube t = lat.tube(sc);
        const double x0 = X(t.lo[0].to_double()), x1 = X(t.hi[0].to_double());
        const double y0 = Y(t.hi[1].to_double()), y1 = Y(t.lo[1].to_double());
        svg << "<rect x='" << x0 << "' y='" << y0 << "' width='" << x1 - x0 << "' height='"
            << y1 - y0 << "' fill='none' stroke='steelblue' stroke-width='1'/>\n";
        svg << "<circle cx='" << X((double)sc.L[0]) << "' cy='" << Y((double)sc.L[1])
            << "' r='2.5' fill='"
            << (sc.D.size() == 2 ? "black" : (sc.D == std::vector<int>{0} ? "crimson" : "green"))
            << "'/>\n";
    }
    // Principal cone edges: t2 = e(2,1) t1 and t2 = t1 / e(1,2).
    const double slope_hi = lat.structure().e(1, 0).to_double();
    const double slope_lo = 1.0 / lat.structure().e(0, 1).to_double();
    const double tmax = (double)bound + 1.5;
    for (double slope : {slope_hi, slope_lo}) {
        const double t1end = std::min(tmax, tmax / slope);
        svg << "<line x1='" << X(0) << "' y1='" << Y(0) << "' x2='" << X(t1end) << "' y2='"
            << Y(slope * t1end) << "' stroke='gray' stroke-dasharray='6 3'/>\n";
        std::ostringstream label;
        if (slope == 1.0)
            label << "k=j";
        else
            label << "k=" << slope << "j";
        svg << "<text x='" << X(t1end) - 24 << "' y='" << Y(slope * t1end) + 14
            << "' font-size='12' fill='gray'>" << label.str() << "</text>\n";
    }
    svg << "<text x='" << X(tmax) - 60 << "' y='" << Y(0) + 16
        << "' font-size='12'>log2|xi1|</text>\n";
    svg << "<text x='" << X(0) - 34 << "' y='" << Y(tmax) + 10
        << "' font-size='12'>log2|xi2|</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

namespace {

// Extreme rays of a polyhedral cone in R^3 given by a.t <= 0 constraints:
// directions from pairwise constraint intersections that satisfy the whole
// system.
std::vector<std::array<double, 3>> cone_section_polygon(const Cone& cone) {
    std::vector<RationalVec> normals;
    for (const auto& c : cone.full) normals.push_back(c.a);
    std::vector<std::array<double, 3>> pts;
    auto admissible = [&](const RationalVec& v) {
        bool nonneg = true;
        for (const auto& c : cone.full) {
            Rational s(0);
            for (int k = 0; k < 3; ++k) s += c.a[k] * v[k];
            if (s > Rational(0)) nonneg = false;
        }
        Rational total = v[0] + v[1] + v[2];
        return nonneg && total > Rational(0);
    };
    auto push = [&](RationalVec v) {
        if (!admissible(v)) return;
        Rational total = v[0] + v[1] + v[2];
        std::array<double, 3> p;
        for (int k = 0; k < 3; ++k) p[k] = (v[k] / total).to_double();
        for (const auto& q : pts)
            if (std::abs(q[0] - p[0]) + std::abs(q[1] - p[1]) + std::abs(q[2] - p[2]) < 1e-12)
                return;
        pts.push_back(p);
    };
    for (std::size_t a = 0; a < normals.size(); ++a)
        for (std::size_t b = a + 1; b < normals.size(); ++b) {
            const auto& u = normals[a];
            const auto& w = normals[b];
            RationalVec cross = {u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2],
                                 u[0] * w[1] - u[1] * w[0]};
            bool zero = cross[0].is_zero() && cross[1].is_zero() && cross[2].is_zero();
            if (zero) continue;
            push(cross);
            push({-cross[0], -cross[1], -cross[2]});
        }
    // Order around the centroid in barycentric plane coordinates.
    if (pts.size() >= 3) {
        double cx = 0, cy = 0;
        auto flat = [](const std::array<double, 3>& p) {
            return std::pair<double, double>(p[1] + 0.5 * p[2], 0.8660254 * p[2]);
        };
        std::vector<std::pair<double, double>> fl;
        for (const auto& p : pts) {
            fl.push_back(flat(p));
            cx += fl.back().first;
            cy += fl.back().second;
        }
        cx /= (double)pts.size();
        cy /= (double)pts.size();
        std::vector<std::size_t> order(pts.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::atan2(fl[a].second - cy, fl[a].first - cx) <
                   std::atan2(fl[b].second - cy, fl[b].first - cx);
        });
        std::vector<std::array<double, 3>> sorted;
        for (std::size_t k : order) sorted.push_back(pts[k]);
        pts = std::move(sorted);
    }
    return pts;
}

}  // namespace

std::string cone_triangle_svg(const PartitionTable& parts) {
    if (parts.structure().n() != 3)
        throw std::invalid_argument("cone triangle requires three factors");
    const double side = 480.0;
    auto X = [&](double b, double c) { return 60.0 + side * (b + 0.5 * c); };
    auto Y = [&](double c) { return 60.0 + side * 0.8660254 * (1.0 - c) - side * (1 - 1); };
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << (int)(side + 140) << "' height='"
        << (int)(side + 140) << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    // Outer triangle: vertices t1, t2, t3.
    svg << "<polygon points='" << X(0, 0) << "," << Y(0) << " " << X(1, 0) << "," << Y(0) << " "
        << X(0, 1) << "," << Y(1) << "' fill='none' stroke='black' stroke-width='1.5'/>\n";
    for (const auto& p : parts.nonempty_interior()) {
        auto poly = cone_section_polygon(parts.cone_gamma(p));
        if (poly.size() < 3) continue;
        svg << "<polygon points='";
        double cx = 0, cy = 0;
        for (const auto& v : poly) {
            const double x = X(v[1], v[2]), y = Y(v[2]);
            svg << x << "," << y << " ";
            cx += x;
            cy += y;
        }
        cx /= (double)poly.size();
        cy /= (double)poly.size();
        svg << "' fill='none' stroke='steelblue'/>\n";
        svg << "<text x='" << cx - 20 << "' y='" << cy << "' font-size='10'>" << p.to_string()
            << "</text>\n";
    }
    svg << "<text x='" << X(0, 0) - 24 << "' y='" << Y(0) + 14 << "' font-size='12'>t1</text>\n";
    svg << "<text x='" << X(1, 0) + 6 << "' y='" << Y(0) + 14 << "' font-size='12'>t2</text>\n";
    svg << "<text x='" << X(0, 1) << "' y='" << Y(1) - 8 << "' font-size='12'>t3</text>\n";
    svg << "</svg>\n";
    return svg.str();
}


std::string norm_curves_svg(const std::vector<NormCurve>& curves) {
    double ymax = 1e-12;
    long long xmax = 1;
    for (const auto& c : curves)
        for (const auto& [w, v] : c.points) {
            ymax = std::max(ymax, v);
            xmax = std::max(xmax, w);
        }
    const double W = 520, H = 360, mx = 50, my = 30;
    auto X = [&](double w) { return mx + (W - 2 * mx) * (w / (double)xmax); };
    auto Y = [&](double v) { return H - my - (H - 2 * my) * (v / (1.1 * ymax)); };
    const char* colors[] = {"steelblue", "crimson", "seagreen", "darkorange", "purple"};
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << (int)W << "' height='" << (int)H
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<line x1='" << X(0) << "' y1='" << Y(0) << "' x2='" << X((double)xmax) << "' y2='"
        << Y(0) << "' stroke='black'/>\n";
    svg << "<line x1='" << X(0) << "' y1='" << Y(0) << "' x2='" << X(0) << "' y2='" << Y(ymax)
        << "' stroke='black'/>\n";
    for (std::size_t c = 0; c < curves.size(); ++c) {
        svg << "<polyline fill='none' stroke='" << colors[c % 5] << "' stroke-width='1.5' points='";
        for (const auto& [w, v] : curves[c].points) svg << X((double)w) << "," << Y(v) << " ";
        svg << "'/>\n";
        if (!curves[c].points.empty())
            svg << "<text x='" << X((double)curves[c].points.back().first) - 40 << "' y='"
                << Y(curves[c].points.back().second) - 6 << "' font-size='11' fill='"
                << colors[c % 5] << "'>" << curves[c].label << "</text>\n";
    }
    svg << "<text x='" << W / 2 - 30 << "' y='" << H - 6
        << "' font-size='12'>window</text>\n<text x='6' y='" << my
        << "' font-size='12'>L1 norm</text>\n</svg>\n";
    return svg.str();
}

namespace {

nlohmann::json rect_json(const DyadicModel::Rect& r) {
    return nlohmann::json{{"level", r.level}, {"offset", r.offset}};
}

DyadicModel::Rect rect_from(const nlohmann::json& j) {
    DyadicModel::Rect r;
    r.level = j.at("level").get<std::vector<int>>();
    r.offset = j.at("offset").get<std::vector<long long>>();
    return r;
}

}  // namespace

std::string journe_instance_to_json(const DyadicModel& m, const RandomModelInstance& inst,
                                    const std::vector<int>& string) {
    nlohmann::json j;
    std::vector<int> depths;
    for (int f = 0; f < m.factors(); ++f) depths.push_back(m.depth(f));
    j["depths"] = depths;
    j["string"] = string;
    // The open set as its finest-cell indicator, run-length friendly enough
    // for the model sizes in use.
    std::vector<int> cells;
    for (std::size_t k = 0; k < inst.omega.cells.size(); ++k)
        if (inst.omega.cells[k]) cells.push_back((int)k);
    j["omega_cells"] = cells;
    j["family"] = nlohmann::json::array();
    for (const auto& r : inst.family) j["family"].push_back(rect_json(r));
    return j.dump(2) + "\n";
}

JourneInstanceFile journe_instance_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    JourneInstanceFile out;
    out.depths = j.at("depths").get<std::vector<int>>();
    out.string = j.at("string").get<std::vector<int>>();
    DyadicModel m(out.depths);
    out.instance.omega.cells = m.empty_set();
    for (int k : j.at("omega_cells").get<std::vector<int>>())
        out.instance.omega.cells[(std::size_t)k] = 1;
    out.instance.omega.measure = m.measure(out.instance.omega.cells);
    for (const auto& rj : j.at("family")) out.instance.family.push_back(rect_from(rj));
    return out;
}

}  // namespace multinorm
