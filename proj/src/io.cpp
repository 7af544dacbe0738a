#include "homctl/io.hpp"

#include "homctl/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace homctl {

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError("'" + path.string() + "': " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": expected a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j.front().is_array() || j.front().empty()) throw ParseError(std::string(what) + ": rows must be arrays");
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw DimensionError(std::string(what) + ": ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const Json& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) throw ParseError(std::string(what) + ": non-numeric entry");
            m(i, c) = v.get<double>();
        }
    }
    return m;
}

namespace {

const Json& field(const Json& j, const char* key, const char* ctx) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string(ctx) + ": missing field '" + key + "'");
    return j.at(key);
}

double number(const Json& j, const char* key, const char* ctx) {
    const Json& v = field(j, key, ctx);
    if (!v.is_number()) throw ParseError(std::string(ctx) + ": field '" + key + "' must be a number");
    return v.get<double>();
}

std::size_t mode_index(const Json& v, const char* ctx) {
    if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw ParseError(std::string(ctx) + ": mode indices are integers starting at 1");
    }
    return static_cast<std::size_t>(v.get<long long>() - 1);
}

Json certificate_to_json(const LmiCertificate& c) {
    return {{"lmi_min_eig", c.lmi_min_eig}, {"dilation_min_eig", c.dilation_min_eig}, {"x_min_eig", c.x_min_eig},
            {"scale", c.scale},             {"margin", c.margin},                     {"pass", c.pass}};
}

Json sinusoid_to_json(const Sinusoid& s) {
    return {{"amplitude", s.amplitude},
            {"frequency", s.frequency},
            {"phase", s.phase},
            {"waveform", s.waveform == Waveform::kSin ? "sin" : "cos"}};
}

Sinusoid sinusoid_from_json(const Json& j) {
    Sinusoid s;
    s.amplitude = number(j, "amplitude", "sinusoid");
    s.frequency = number(j, "frequency", "sinusoid");
    s.phase = j.value("phase", 0.0);
    const std::string w = j.value("waveform", std::string("sin"));
    if (w == "sin") s.waveform = Waveform::kSin;
    else if (w == "cos") s.waveform = Waveform::kCos;
    else throw ParseError("sinusoid: waveform must be 'sin' or 'cos'");
    return s;
}

}  // namespace

SwitchedPlant plant_from_json(const Json& j) {
    const Json& modes = field(j, "modes", "plant");
    if (!modes.is_array() || modes.empty()) throw ParseError("plant: 'modes' must be a nonempty array");
    std::vector<Mode> out;
    for (const Json& mj : modes) {
        Mode md;
        md.A = matrix_from_json(field(mj, "A", "plant mode"), "A");
        md.B = matrix_from_json(field(mj, "B", "plant mode"), "B");
        if (mj.contains("E") && !mj.at("E").is_null()) md.E = matrix_from_json(mj.at("E"), "E");
        out.push_back(std::move(md));
    }
    SwitchedPlant plant(std::move(out));
    for (const char* key : {"n", "m", "p"}) {
        if (!j.contains(key)) continue;
        const Eigen::Index declared = j.at(key).get<Eigen::Index>();
        const Eigen::Index actual = key[0] == 'n' ? plant.n() : key[0] == 'm' ? plant.m() : plant.p();
        if (declared != actual) {
            throw DimensionError(std::string("plant: declared ") + key + " = " + std::to_string(declared) +
                                 " but matrices give " + std::to_string(actual));
        }
    }
    return plant;
}

Json plant_to_json(const SwitchedPlant& plant) {
    Json modes = Json::array();
    for (const Mode& md : plant.modes()) {
        modes.push_back({{"A", matrix_to_json(md.A)}, {"B", matrix_to_json(md.B)}, {"E", matrix_to_json(md.E)}});
    }
    return {{"n", plant.n()}, {"m", plant.m()}, {"p", plant.p()}, {"modes", modes}};
}

Json controller_to_json(const Controller& c) {
    Json modes = Json::array();
    for (const auto& g : c.modes) {
        modes.push_back({{"X", matrix_to_json(g.X)},
                         {"P", matrix_to_json(g.P)},
                         {"Y", matrix_to_json(g.Y)},
                         {"K", matrix_to_json(g.K)},
                         {"K0", matrix_to_json(g.K0)},
                         {"rho", g.rho},
                         {"k_tilde", g.k_tilde},
                         {"certificate", certificate_to_json(g.certificate)}});
    }
    Json j = {{"kind", to_string(c.kind)}, {"mu", c.mu}, {"Gd", matrix_to_json(c.Gd)}, {"modes", modes}};
    if (c.gamma) j["gamma"] = *c.gamma;
    if (c.c1) j["c1"] = *c.c1;
    if (c.c2) j["c2"] = *c.c2;
    return j;
}

Controller controller_from_json(const Json& j) {
    Controller c;
    const std::string kind = field(j, "kind", "controller").get<std::string>();
    if (kind == "common") c.kind = ControllerKind::kCommon;
    else if (kind == "multiple") c.kind = ControllerKind::kMultiple;
    else throw ParseError("controller: kind must be 'common' or 'multiple'");
    c.mu = number(j, "mu", "controller");
    c.Gd = matrix_from_json(field(j, "Gd", "controller"), "Gd");
    const Json& modes = field(j, "modes", "controller");
    if (!modes.is_array() || modes.empty()) throw ParseError("controller: 'modes' must be a nonempty array");
    for (const Json& mj : modes) {
        ModeGains g;
        g.P = matrix_from_json(field(mj, "P", "controller mode"), "P");
        g.X = mj.contains("X") ? matrix_from_json(mj.at("X"), "X") : Matrix(g.P.inverse());
        g.K = matrix_from_json(field(mj, "K", "controller mode"), "K");
        g.Y = mj.contains("Y") ? matrix_from_json(mj.at("Y"), "Y") : Matrix(g.K * g.X);
        g.K0 = mj.contains("K0") ? matrix_from_json(mj.at("K0"), "K0") : Matrix::Zero(g.K.rows(), g.K.cols());
        g.rho = number(mj, "rho", "controller mode");
        g.k_tilde = mj.contains("k_tilde") ? mj.at("k_tilde").get<double>() : control_effort_bound(g.X, g.K);
        if (mj.contains("certificate")) {
            const Json& cj = mj.at("certificate");
            g.certificate.lmi_min_eig = cj.value("lmi_min_eig", 0.0);
            g.certificate.dilation_min_eig = cj.value("dilation_min_eig", 0.0);
            g.certificate.x_min_eig = cj.value("x_min_eig", 0.0);
            g.certificate.scale = cj.value("scale", 1.0);
            g.certificate.margin = cj.value("margin", 1e-6);
            g.certificate.pass = cj.value("pass", false);
        }
        const Eigen::Index n = c.Gd.rows();
        if (g.P.rows() != n || g.P.cols() != n || g.K.cols() != n || g.K0.cols() != n || g.K0.rows() != g.K.rows()) {
            throw DimensionError("controller: gain shapes do not match Gd");
        }
        c.modes.push_back(std::move(g));
    }
    if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
    if (j.contains("c1")) c.c1 = j.at("c1").get<double>();
    if (j.contains("c2")) c.c2 = j.at("c2").get<double>();
    return c;
}

Controller load_controller(const std::filesystem::path& path) { return controller_from_json(read_json_file(path)); }

void save_controller(const Controller& c, const std::filesystem::path& path) {
    write_json_file(path, controller_to_json(c));
}

Json policy_to_json(const SwitchingPolicy& p) {
    Json j = {{"kind", to_string(p.kind)}};
    Json cycle = Json::array();
    for (std::size_t m : p.cycle) cycle.push_back(m + 1);
    switch (p.kind) {
        case SwitchingKind::kFixedSequence: {
            j["initial_mode"] = p.initial_mode + 1;
            Json seq = Json::array();
            for (const auto& sp : p.sequence) seq.push_back(Json::array({sp.time, sp.mode + 1}));
            j["sequence"] = seq;
            break;
        }
        case SwitchingKind::kPeriodic:
            j["period"] = p.period;
            j["cycle"] = cycle;
            break;
        case SwitchingKind::kMinDwell:
            j["tau"] = p.tau;
            j["jitter"] = p.jitter;
            j["seed"] = p.seed;
            j["cycle"] = cycle;
            break;
        case SwitchingKind::kAverageDwell:
            j["tau_d"] = p.tau_d;
            j["n0"] = p.n0;
            j["burst_gap"] = p.burst_gap;
            j["cycle"] = cycle;
            break;
        case SwitchingKind::kStateDependent:
            j["proposal_gap"] = p.tau;
            j["cycle"] = cycle;
            break;
    }
    if (p.time_scale != 1.0) j["time_scale"] = p.time_scale;
    return j;
}

SwitchingPolicy policy_from_json(const Json& j) {
    SwitchingPolicy p;
    p.kind = switching_kind_from_string(field(j, "kind", "switching").get<std::string>());
    if (j.contains("cycle")) {
        p.cycle.clear();
        for (const Json& v : j.at("cycle")) p.cycle.push_back(mode_index(v, "switching cycle"));
    }
    switch (p.kind) {
        case SwitchingKind::kFixedSequence:
            p.initial_mode = j.contains("initial_mode") ? mode_index(j.at("initial_mode"), "switching") : 0;
            if (j.contains("sequence")) {
                for (const Json& e : j.at("sequence")) {
                    if (!e.is_array() || e.size() != 2) throw ParseError("switching: sequence entries are [time, mode]");
                    p.sequence.push_back({e[0].get<double>(), mode_index(e[1], "switching sequence")});
                }
            }
            break;
        case SwitchingKind::kPeriodic: p.period = number(j, "period", "switching"); break;
        case SwitchingKind::kMinDwell:
            p.tau = number(j, "tau", "switching");
            p.jitter = j.value("jitter", 0.0);
            p.seed = j.value("seed", std::uint64_t{0});
            break;
        case SwitchingKind::kAverageDwell:
            p.tau_d = number(j, "tau_d", "switching");
            p.n0 = j.value("n0", std::size_t{0});
            p.burst_gap = j.value("burst_gap", 0.0);
            break;
        case SwitchingKind::kStateDependent: p.tau = number(j, "proposal_gap", "switching"); break;
    }
    p.time_scale = j.value("time_scale", 1.0);
    return p;
}

SwitchingPolicy load_policy(const std::filesystem::path& path) { return policy_from_json(read_json_file(path)); }

Json disturbance_to_json(const DisturbanceSpec& d) {
    switch (d.kind) {
        case DisturbanceKind::kNone: return {{"kind", "none"}};
        case DisturbanceKind::kMatchedSinusoid: {
            Json j = sinusoid_to_json(d.matched);
            j["kind"] = "matched-sinusoid";
            j["channel"] = d.matched_channel + 1;
            return j;
        }
        case DisturbanceKind::kSinusoidSum: {
            Json chans = Json::array();
            for (const auto& ch : d.channels) {
                Json terms = Json::array();
                for (const auto& s : ch) terms.push_back(sinusoid_to_json(s));
                chans.push_back(terms);
            }
            return {{"kind", "sinusoid-sum"}, {"channels", chans}};
        }
    }
    return {{"kind", "none"}};
}

DisturbanceSpec disturbance_from_json(const Json& j) {
    const std::string kind = field(j, "kind", "disturbance").get<std::string>();
    if (kind == "none") return DisturbanceSpec::none();
    if (kind == "matched-sinusoid") {
        const std::size_t ch = j.contains("channel") ? mode_index(j.at("channel"), "disturbance channel") : 0;
        return DisturbanceSpec::matched_sinusoid(sinusoid_from_json(j), ch);
    }
    if (kind == "sinusoid-sum") {
        std::vector<std::vector<Sinusoid>> chans;
        for (const Json& cj : field(j, "channels", "disturbance")) {
            std::vector<Sinusoid> terms;
            for (const Json& s : cj) terms.push_back(sinusoid_from_json(s));
            chans.push_back(std::move(terms));
        }
        return DisturbanceSpec::sinusoid_sum(std::move(chans));
    }
    throw ParseError("disturbance: unknown kind '" + kind + "'");
}

DisturbanceSpec load_disturbance(const std::filesystem::path& path) {
    return disturbance_from_json(read_json_file(path));
}

Json report_to_json(const Report& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"suite", c.suite},
                          {"name", c.name},
                          {"anchor", c.anchor},
                          {"pass", c.pass},
                          {"margin", c.margin},
                          {"tolerance", c.tolerance},
                          {"detail", c.detail}});
    }
    return {{"seed", r.seed}, {"pass", r.pass()}, {"checks", checks}};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const Eigen::Index n = traj.empty() ? 0 : traj.states.front().size();
    const Eigen::Index m = traj.empty() ? 0 : traj.inputs.front().size();
    os << "t,sigma";
    for (Eigen::Index i = 1; i <= n; ++i) os << ",x" << i;
    for (Eigen::Index i = 1; i <= m; ++i) os << ",u" << i;
    os << ",vnorm\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (std::size_t k = 0; k < traj.size(); ++k) {
        put(traj.times[k]);
        os << ',' << traj.modes[k] + 1;
        for (Eigen::Index i = 0; i < n; ++i) {
            os << ',';
            put(traj.states[k][i]);
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            os << ',';
            put(traj.inputs[k][i]);
        }
        os << ',';
        put(traj.vnorm[k]);
        os << '\n';
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_trajectory_csv(out, traj);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("trajectory CSV: empty file");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 4 || header[0] != "t" || header[1] != "sigma" || header.back() != "vnorm") {
        throw ParseError("trajectory CSV: header must be t,sigma,x1..xn,u1..um,vnorm");
    }
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    for (std::size_t i = 2; i + 1 < header.size(); ++i) {
        if (header[i][0] == 'x') ++n;
        else if (header[i][0] == 'u') ++m;
        else throw ParseError("trajectory CSV: unexpected column '" + header[i] + "'");
    }
    Trajectory traj;
    std::optional<std::size_t> prev_mode;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != header.size()) throw ParseError("trajectory CSV: row width differs from header");
        const double t = vals[0];
        const auto mode = static_cast<std::size_t>(vals[1]) - 1;
        traj.times.push_back(t);
        traj.modes.push_back(mode);
        traj.states.push_back(Eigen::Map<Vector>(vals.data() + 2, n));
        traj.inputs.push_back(Eigen::Map<Vector>(vals.data() + 2 + n, m));
        traj.vnorm.push_back(vals.back());
        if (prev_mode && *prev_mode != mode) traj.switches.push_back({t, *prev_mode, mode});
        prev_mode = mode;
    }
    if (traj.size() > 1) traj.h = traj.times[1] - traj.times[0];
    return traj;
}

Json trajectory_events_to_json(const Trajectory& traj) {
    Json sw = Json::array();
    for (const auto& e : traj.switches) sw.push_back({{"t", e.time}, {"from", e.from + 1}, {"to", e.to + 1}});
    Json j = {{"h", traj.h}, {"samples", traj.size()}, {"switches", sw}};
    j["clamp_time"] = traj.clamp_time ? Json(*traj.clamp_time) : Json(nullptr);
    return j;
}

}  // namespace homctl
