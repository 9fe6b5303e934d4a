#ifndef GTQW_PHOTONICS_HPP
#define GTQW_PHOTONICS_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gtqw/error.hpp"
#include "gtqw/graphs.hpp"

namespace gtqw {

/// Evanescent coupling between two waveguides, C(d) = C0 exp(-d / d0).
struct CouplingModel {
    double c0_per_mm = 1.0;
    double d0_mm = 1.0;

    double coupling(double spacing_mm) const { return c0_per_mm * std::exp(-spacing_mm / d0_mm); }

    /// Inverse of coupling(); the spacing may come out negative when the
    /// target exceeds C0, callers decide whether that is acceptable.
    double spacing_for(double coupling_per_mm) const { return d0_mm * std::log(c0_per_mm / coupling_per_mm); }
};

struct CouplingSample {
    double spacing_mm;
    double coupling_per_mm;
};

struct CouplingFit {
    CouplingModel model;
    double rms_log_residual = 0.0;
    double max_relative_residual = 0.0;
};

/// Least squares on log C = log C0 - d / d0.
inline CouplingFit fit_coupling_model(const std::vector<CouplingSample>& samples) {
    if (samples.size() < 2) {
        throw ParameterError("coupling fit needs at least 2 samples");
    }
    double md = 0.0, ml = 0.0;
    for (const auto& s : samples) {
        if (!(s.coupling_per_mm > 0.0) || !std::isfinite(s.coupling_per_mm) || !std::isfinite(s.spacing_mm)) {
            throw ParameterError("coupling samples must be finite with positive coupling");
        }
        md += s.spacing_mm;
        ml += std::log(s.coupling_per_mm);
    }
    const auto m = static_cast<double>(samples.size());
    md /= m;
    ml /= m;
    double sdd = 0.0, sdl = 0.0;
    for (const auto& s : samples) {
        sdd += (s.spacing_mm - md) * (s.spacing_mm - md);
        sdl += (s.spacing_mm - md) * (std::log(s.coupling_per_mm) - ml);
    }
    if (sdd == 0.0) {
        throw ParameterError("coupling fit needs at least two distinct spacings");
    }
    const double slope = sdl / sdd;
    if (!(slope < 0.0)) {
        throw ParameterError("measured coupling does not decrease with spacing");
    }
    CouplingFit fit;
    fit.model.d0_mm = -1.0 / slope;
    fit.model.c0_per_mm = std::exp(ml - slope * md);
    double ss = 0.0;
    for (const auto& s : samples) {
        const double predicted = fit.model.coupling(s.spacing_mm);
        const double r = std::log(s.coupling_per_mm) - std::log(predicted);
        ss += r * r;
        fit.max_relative_residual =
            std::max(fit.max_relative_residual, std::abs(s.coupling_per_mm - predicted) / predicted);
    }
    fit.rms_log_residual = std::sqrt(ss / m);
    return fit;
}

/// Transverse placement of the 2n+2 waveguides realizing the reduced chain.
struct WaveguideLayout {
    int branching = 0;
    int depth = 0;
    double gamma_phys_per_mm = 0.0;
    double length_mm = 0.0;
    std::size_t center_pair_index = 0;  // gap between waveguides n and n+1
    std::vector<double> positions_mm;
    std::vector<double> spacings_mm;
    std::vector<double> couplings_per_mm;  // realized C(spacing) for each gap
};

/// Spacings come from inverting the coupling model at the chain targets
/// sqrt(B) gamma (outer gaps) and B gamma (center gap).
inline WaveguideLayout design_layout(int B, int n, double gamma_phys_per_mm, const CouplingModel& model,
                                     double length_mm) {
    detail::check_tree_params(B, n);
    if (!(gamma_phys_per_mm > 0.0) || !(length_mm > 0.0)) {
        throw ParameterError("layout needs positive gamma_phys and length");
    }
    if (!(model.c0_per_mm > 0.0) || !(model.d0_mm > 0.0)) {
        throw ParameterError("coupling model needs positive C0 and d0");
    }
    const double outer = std::sqrt(static_cast<double>(B)) * gamma_phys_per_mm;
    const double center = static_cast<double>(B) * gamma_phys_per_mm;
    for (double target : {outer, center}) {
        if (target >= model.c0_per_mm) {
            throw DesignError("target coupling " + std::to_string(target) + "/mm is not below C0 = " +
                              std::to_string(model.c0_per_mm) + "/mm; it would need a nonpositive spacing");
        }
    }

    WaveguideLayout layout;
    layout.branching = B;
    layout.depth = n;
    layout.gamma_phys_per_mm = gamma_phys_per_mm;
    layout.length_mm = length_mm;
    layout.center_pair_index = static_cast<std::size_t>(n);
    const std::size_t gaps = 2 * static_cast<std::size_t>(n) + 1;
    layout.positions_mm.push_back(0.0);
    for (std::size_t k = 0; k < gaps; ++k) {
        const double target = k == layout.center_pair_index ? center : outer;
        const double d = model.spacing_for(target);
        layout.spacings_mm.push_back(d);
        layout.couplings_per_mm.push_back(model.coupling(d));
        layout.positions_mm.push_back(layout.positions_mm.back() + d);
    }
    return layout;
}

inline nlohmann::json layout_to_json(const WaveguideLayout& l) {
    return {{"B", l.branching},
            {"n", l.depth},
            {"gamma_phys", l.gamma_phys_per_mm},
            {"z_mm", l.length_mm},
            {"positions_mm", l.positions_mm},
            {"spacings_mm", l.spacings_mm},
            {"couplings_per_mm", l.couplings_per_mm}};
}

/// Camera frame, row-major, counts per pixel.
struct Frame {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> intensities;

    double at(std::size_t x, std::size_t y) const { return intensities[y * width + x]; }
    double& at(std::size_t x, std::size_t y) { return intensities[y * width + x]; }
};

struct Spot {
    double x = 0.0;
    double y = 0.0;
    double radius = 0.0;
};

struct SpotProbabilities {
    std::vector<double> probabilities;
    std::vector<std::string> warnings;
};

namespace detail {

inline void check_frame(const Frame& f) {
    if (f.width == 0 || f.height == 0 || f.intensities.size() != f.width * f.height) {
        throw ParameterError("frame dimensions do not match its pixel count");
    }
    for (double v : f.intensities) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ParameterError("frame intensities must be finite and nonnegative");
        }
    }
}

}  // namespace detail

/// Disc sums around each spot, normalized. A pixel inside several discs is
/// credited to the nearest center (lowest index on ties) and a warning is
/// recorded.
inline SpotProbabilities frame_probabilities(const Frame& frame, const std::vector<Spot>& spots) {
    detail::check_frame(frame);
    if (spots.empty()) {
        throw ParameterError("at least one spot is required");
    }
    for (std::size_t s = 0; s < spots.size(); ++s) {
        const auto& sp = spots[s];
        if (!(sp.radius > 0.0) || sp.x - sp.radius < 0.0 || sp.y - sp.radius < 0.0 ||
            sp.x + sp.radius > static_cast<double>(frame.width - 1) ||
            sp.y + sp.radius > static_cast<double>(frame.height - 1)) {
            throw ParameterError("spot " + std::to_string(s) + " disc does not lie inside the frame");
        }
    }

    SpotProbabilities out;
    out.probabilities.assign(spots.size(), 0.0);
    std::size_t shared = 0;
    for (std::size_t y = 0; y < frame.height; ++y) {
        for (std::size_t x = 0; x < frame.width; ++x) {
            std::size_t owner = spots.size();
            double best = std::numeric_limits<double>::infinity();
            int hits = 0;
            for (std::size_t s = 0; s < spots.size(); ++s) {
                const double dx = static_cast<double>(x) - spots[s].x;
                const double dy = static_cast<double>(y) - spots[s].y;
                const double r2 = dx * dx + dy * dy;
                if (r2 <= spots[s].radius * spots[s].radius) {
                    ++hits;
                    if (r2 < best) {
                        best = r2;
                        owner = s;
                    }
                }
            }
            if (hits > 1) {
                ++shared;
            }
            if (owner < spots.size()) {
                out.probabilities[owner] += frame.at(x, y);
            }
        }
    }
    if (shared > 0) {
        out.warnings.push_back(std::to_string(shared) + " pixels fall inside overlapping spots; assigned to nearest center");
    }
    double total = 0.0;
    for (double v : out.probabilities) {
        total += v;
    }
    if (!(total > 0.0)) {
        throw ParameterError("total intensity inside the spots is zero");
    }
    for (double& v : out.probabilities) {
        v /= total;
    }
    return out;
}

inline double hitting_from_frame(const Frame& frame, const std::vector<Spot>& spots, std::size_t exit_index) {
    if (exit_index >= spots.size()) {
        throw ParameterError("exit index " + std::to_string(exit_index) + " out of range for " +
                             std::to_string(spots.size()) + " spots");
    }
    return frame_probabilities(frame, spots).probabilities[exit_index];
}

/// Experimental: the `count` brightest local maxima at least 2*radius apart,
/// ordered left to right, each with the given radius.
inline std::vector<Spot> detect_spots(const Frame& frame, std::size_t count, double radius) {
    detail::check_frame(frame);
    std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> peaks;
    for (std::size_t y = 0; y < frame.height; ++y) {
        for (std::size_t x = 0; x < frame.width; ++x) {
            const double v = frame.at(x, y);
            if (v <= 0.0) {
                continue;
            }
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const auto nx = static_cast<std::ptrdiff_t>(x) + dx;
                    const auto ny = static_cast<std::ptrdiff_t>(y) + dy;
                    if ((dx || dy) && nx >= 0 && ny >= 0 && nx < static_cast<std::ptrdiff_t>(frame.width) &&
                        ny < static_cast<std::ptrdiff_t>(frame.height) &&
                        frame.at(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny)) > v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) {
                peaks.push_back({v, {x, y}});
            }
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Spot> spots;
    for (const auto& [v, at] : peaks) {
        if (spots.size() == count) {
            break;
        }
        const Spot cand{static_cast<double>(at.first), static_cast<double>(at.second), radius};
        const bool clear = std::all_of(spots.begin(), spots.end(), [&](const Spot& s) {
            return std::hypot(s.x - cand.x, s.y - cand.y) >= 2.0 * radius;
        });
        if (clear) {
            spots.push_back(cand);
        }
    }
    if (spots.size() < count) {
        throw ParameterError("found only " + std::to_string(spots.size()) + " of " + std::to_string(count) + " spots");
    }
    std::sort(spots.begin(), spots.end(), [](const Spot& a, const Spot& b) { return a.x < b.x; });
    return spots;
}

namespace detail {

// Next whitespace-separated token of a PGM header, skipping '#' comments.
inline std::string pgm_token(std::istream& is) {
    std::string tok;
    char c;
    while (is.get(c)) {
        if (c == '#') {
            std::string rest;
            std::getline(is, rest);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) {
                return tok;
            }
            continue;
        }
        tok.push_back(c);
    }
    return tok;
}

inline std::size_t pgm_number(std::istream& is, const char* what) {
    const std::string tok = pgm_token(is);
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(tok, &used);
        if (used != tok.size()) {
            throw std::invalid_argument(tok);
        }
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw IoError(std::string("pgm: bad ") + what + " '" + tok + "'");
    }
}

}  // namespace detail

/// Whitespace-separated numbers, one pixel row per line. Blank lines are skipped.
inline Frame read_frame_ascii(std::istream& is) {
    Frame f;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream row(line);
        std::vector<double> values;
        std::string tok;
        while (row >> tok) {
            try {
                std::size_t used = 0;
                const double v = std::stod(tok, &used);
                if (used != tok.size() || !(v >= 0.0) || !std::isfinite(v)) {
                    throw std::invalid_argument(tok);
                }
                values.push_back(v);
            } catch (const std::exception&) {
                throw IoError("frame line " + std::to_string(line_no) + ": bad intensity '" + tok + "'");
            }
        }
        if (values.empty()) {
            continue;
        }
        if (f.width == 0) {
            f.width = values.size();
        } else if (values.size() != f.width) {
            throw IoError("frame line " + std::to_string(line_no) + ": expected " + std::to_string(f.width) +
                          " values, found " + std::to_string(values.size()));
        }
        f.intensities.insert(f.intensities.end(), values.begin(), values.end());
        ++f.height;
    }
    if (f.height == 0) {
        throw IoError("frame is empty");
    }
    return f;
}

/// Plain (P2) or binary (P5) PGM, 8- or 16-bit.
inline Frame read_frame_pgm(std::istream& is) {
    const std::string magic = detail::pgm_token(is);
    if (magic != "P2" && magic != "P5") {
        throw IoError("not a PGM file (magic '" + magic + "')");
    }
    Frame f;
    f.width = detail::pgm_number(is, "width");
    f.height = detail::pgm_number(is, "height");
    const std::size_t maxval = detail::pgm_number(is, "maxval");
    if (f.width == 0 || f.height == 0 || maxval == 0 || maxval > 65535) {
        throw IoError("pgm: invalid header");
    }
    f.intensities.resize(f.width * f.height);
    if (magic == "P2") {
        for (auto& v : f.intensities) {
            v = static_cast<double>(detail::pgm_number(is, "pixel"));
        }
    } else {
        const std::size_t bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(f.intensities.size() * bytes);
        is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(is.gcount()) != raw.size()) {
            throw IoError("pgm: truncated pixel data");
        }
        for (std::size_t i = 0; i < f.intensities.size(); ++i) {
            f.intensities[i] = bytes == 2 ? static_cast<double>((raw[2 * i] << 8) | raw[2 * i + 1])
                                          : static_cast<double>(raw[i]);
        }
    }
    return f;
}

inline Frame read_frame_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open frame file " + path);
    }
    const int first = in.peek();
    if (first == 'P') {
        return read_frame_pgm(in);
    }
    return read_frame_ascii(in);
}

/// Spots file: JSON array of {"x": .., "y": .., "radius": ..}.
inline std::vector<Spot> spots_from_json(const nlohmann::json& j) {
    if (!j.is_array()) {
        throw IoError("spots file must hold a JSON array");
    }
    std::vector<Spot> spots;
    for (std::size_t i = 0; i < j.size(); ++i) {
        try {
            spots.push_back({j[i].at("x").get<double>(), j[i].at("y").get<double>(), j[i].at("radius").get<double>()});
        } catch (const nlohmann::json::exception& e) {
            throw IoError("spot " + std::to_string(i) + ": " + e.what());
        }
    }
    return spots;
}

/// Trigger and coincidence counts of the heralded anti-correlation test.
struct CoincidenceCounts {
    std::uint64_t n3 = 0;
    std::uint64_t n13 = 0;
    std::uint64_t n23 = 0;
    std::uint64_t n123 = 0;
};

struct AlphaEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// alpha = N3 N123 / (N13 N23). Standard error from first-order propagation
/// with independent Poisson counts (var N = N).
inline AlphaEstimate alpha(const CoincidenceCounts& c) {
    if (c.n13 == 0 || c.n23 == 0) {
        throw ParameterError("alpha is undefined when N13 or N23 is zero");
    }
    if (c.n13 > c.n3 || c.n23 > c.n3 || c.n123 > std::min(c.n13, c.n23)) {
        throw ParameterError("inconsistent counts: need N123 <= min(N13, N23) and N13, N23 <= N3");
    }
    const double n3 = static_cast<double>(c.n3);
    const double n13 = static_cast<double>(c.n13);
    const double n23 = static_cast<double>(c.n23);
    const double n123 = static_cast<double>(c.n123);
    AlphaEstimate a;
    a.value = n3 * n123 / (n13 * n23);
    const double d3 = n123 / (n13 * n23);
    const double d123 = n3 / (n13 * n23);
    const double d13 = a.value / n13;
    const double d23 = a.value / n23;
    a.std_error = std::sqrt(d3 * d3 * n3 + d123 * d123 * n123 + d13 * d13 * n13 + d23 * d23 * n23);
    return a;
}

/// CSV with header N3,N13,N23,N123 and one or more data rows.
inline std::vector<CoincidenceCounts> read_counts_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::vector<CoincidenceCounts> rows;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell.erase(0, cell.find_first_not_of(" \t"));
            cell.erase(cell.find_last_not_of(" \t") + 1);
            cells.push_back(cell);
        }
        if (!header) {
            if (cells != std::vector<std::string>{"N3", "N13", "N23", "N123"}) {
                throw IoError("counts line " + std::to_string(line_no) + ": expected header N3,N13,N23,N123");
            }
            header = true;
            continue;
        }
        if (cells.size() != 4) {
            throw IoError("counts line " + std::to_string(line_no) + ": expected 4 fields, found " +
                          std::to_string(cells.size()));
        }
        std::uint64_t v[4];
        for (int k = 0; k < 4; ++k) {
            try {
                std::size_t used = 0;
                if (cells[k].empty() || cells[k][0] == '-') {
                    throw std::invalid_argument(cells[k]);
                }
                v[k] = std::stoull(cells[k], &used);
                if (used != cells[k].size()) {
                    throw std::invalid_argument(cells[k]);
                }
            } catch (const std::exception&) {
                throw IoError("counts line " + std::to_string(line_no) + ": bad count '" + cells[k] + "'");
            }
        }
        rows.push_back({v[0], v[1], v[2], v[3]});
    }
    if (!header) {
        throw IoError("counts file is empty");
    }
    if (rows.empty()) {
        throw IoError("counts file has no data rows");
    }
    return rows;
}

/// CSV with header spacing_mm,coupling_per_mm.
inline std::vector<CouplingSample> read_calibration_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::vector<CouplingSample> rows;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') {
            continue;
        }
        if (!header) {
            if (line.find("spacing_mm") == std::string::npos || line.find("coupling_per_mm") == std::string::npos) {
                throw IoError("calibration line " + std::to_string(line_no) +
                              ": expected header spacing_mm,coupling_per_mm");
            }
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw IoError("calibration line " + std::to_string(line_no) + ": expected 2 fields");
        }
        try {
            std::size_t u1 = 0, u2 = 0;
            const std::string a = line.substr(0, comma);
            const std::string b = line.substr(comma + 1);
            const double d = std::stod(a, &u1);
            const double c = std::stod(b, &u2);
            if (a.find_first_not_of(" \t", u1) != std::string::npos ||
                b.find_first_not_of(" \t", u2) != std::string::npos) {
                throw std::invalid_argument(line);
            }
            rows.push_back({d, c});
        } catch (const std::exception&) {
            throw IoError("calibration line " + std::to_string(line_no) + ": bad number in '" + line + "'");
        }
    }
    if (rows.empty()) {
        throw IoError("calibration file has no samples");
    }
    return rows;
}

}  // namespace gtqw

#endif
