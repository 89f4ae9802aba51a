#include "opim/problem.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace opim {

double ProblemSpec::param(const std::string& name) const {
    auto it = params.find(name);
    if (it != params.end()) return it->second;
    if (name == "pi") return std::numbers::pi;
    throw Error("problem '" + id + "' has no parameter '" + name + "'");
}

MethodConfig method_from_name(const std::string& name, int iterations) {
    if (iterations < 1) throw Error("iteration count must be at least 1");
    MethodConfig cfg;
    cfg.iterations = iterations;
    if (name == "pia11") {
        cfg.taylor_order = 1;
        cfg.optimal = false;
    } else if (name == "pia12") {
        cfg.taylor_order = 2;
        cfg.optimal = false;
    } else if (name == "opia11") {
        cfg.taylor_order = 1;
        cfg.optimal = true;
    } else if (name == "opia12") {
        cfg.taylor_order = 2;
        cfg.optimal = true;
    } else {
        throw Error("unknown method '" + name +
                    "' (expected pia11, pia12, opia11 or opia12)");
    }
    return cfg;
}

std::string method_name(const MethodConfig& cfg) {
    std::string name = cfg.optimal ? "opia1" : "pia1";
    return name + std::to_string(cfg.taylor_order);
}

int default_iterations(int taylor_order) { return taylor_order == 2 ? 2 : 3; }

ProblemSpec make_example1() {
    ProblemSpec p;
    p.id = "example1";
    p.nonlinearity = parse("-2*exp(y)");
    p.a = 0.0;
    p.b = 1.0;
    p.conditions = {ConditionKind::Ivp, 0.0, 0.0};
    p.exact = "example1";
    return p;
}

ProblemSpec make_example2(double lambda) {
    ProblemSpec p;
    p.id = "example2";
    p.nonlinearity = parse("lambda*exp(y)");
    p.params["lambda"] = lambda;
    p.a = 0.0;
    p.b = 1.0;
    p.conditions = {ConditionKind::Bvp, 0.0, 0.0};
    p.exact = "bratu1";
    return p;
}

ProblemSpec make_example3() {
    ProblemSpec p;
    p.id = "example3";
    p.nonlinearity = parse("pi^2*exp(-y)");
    p.a = 0.0;
    p.b = 1.0;
    p.conditions = {ConditionKind::Bvp, 0.0, 0.0};
    p.exact = "bratu2";
    return p;
}

namespace {

[[noreturn]] void fail_line(const std::string& id, int line, const std::string& msg) {
    throw Error(id + " line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// The linear side must be a fixed-coefficient combination of y, y' and y''.
// Coefficients are read off by evaluating at unit vectors; the shape is then
// confirmed at a handful of fixed pseudo-random states so that, say,
// "y*ddy" is rejected rather than silently misread.
void extract_linear(const ExprPtr& e, const ParamBindings& params, const std::string& id,
                    int line, ProblemSpec& out) {
    if (contains(e, Var::X) || contains(e, Var::Eps))
        fail_line(id, line, "linear part may only mention y, dy and ddy");

    auto eval_lin = [&](double y, double dy, double ddy) {
        VarBindings v;
        v.y = y;
        v.dy = dy;
        v.ddy = ddy;
        return eval_at(e, v, params);
    };

    double base = eval_lin(0, 0, 0);
    if (std::abs(base) > 1e-12)
        fail_line(id, line, "linear part has a constant term (fold it into the nonlinear part)");
    out.p0 = eval_lin(1, 0, 0);
    out.p1 = eval_lin(0, 1, 0);
    out.p2 = eval_lin(0, 0, 1);

    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int i = 0; i < 8; ++i) {
        double y = dist(rng), dy = dist(rng), ddy = dist(rng);
        double expect = out.p0 * y + out.p1 * dy + out.p2 * ddy;
        if (std::abs(eval_lin(y, dy, ddy) - expect) > 1e-9 * (1.0 + std::abs(expect)))
            fail_line(id, line, "linear part is not linear in (y, dy, ddy)");
    }
    if (out.p2 == 0.0) fail_line(id, line, "coefficient of ddy must be nonzero");
}

}  // namespace

ProblemSpec parse_problem_text(const std::string& text, const std::string& id) {
    ProblemSpec p;
    p.id = id;

    // Two passes: parameters first, so expressions may use them regardless
    // of where the param lines sit in the file.
    struct Line {
        int number;
        std::string key, value;
    };
    std::vector<Line> lines;

    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string s = trim(raw);
        if (s.empty()) continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) fail_line(id, number, "expected 'key = value'");
        lines.push_back({number, trim(s.substr(0, eq)), trim(s.substr(eq + 1))});
        if (lines.back().key.empty()) fail_line(id, number, "empty key");
        if (lines.back().value.empty()) fail_line(id, number, "empty value");
    }

    std::set<std::string> param_names = {"lambda"};
    for (const Line& l : lines) {
        if (l.key.rfind("param ", 0) != 0) continue;
        std::string name = trim(l.key.substr(6));
        if (name.empty()) fail_line(id, l.number, "param needs a name");
        try {
            p.params[name] = std::stod(l.value);
        } catch (const std::exception&) {
            fail_line(id, l.number, "param value is not a number");
        }
        param_names.insert(name);
    }

    bool saw_domain = false, saw_conditions = false, saw_linear = false;
    for (const Line& l : lines) {
        if (l.key.rfind("param ", 0) == 0) continue;

        if (l.key == "linear") {
            if (saw_linear) fail_line(id, l.number, "duplicate linear key");
            saw_linear = true;
            ExprPtr e;
            try {
                e = parse(l.value, param_names);
            } catch (const ParseError& err) {
                fail_line(id, l.number, std::string("linear: ") + err.what());
            }
            extract_linear(e, p.params, id, l.number, p);
        } else if (l.key == "nonlinear") {
            if (p.nonlinearity) fail_line(id, l.number, "duplicate nonlinear key");
            try {
                p.nonlinearity = parse(l.value, param_names);
            } catch (const ParseError& err) {
                fail_line(id, l.number, std::string("nonlinear: ") + err.what());
            }
        } else if (l.key == "domain") {
            if (saw_domain) fail_line(id, l.number, "duplicate domain key");
            saw_domain = true;
            std::istringstream v(l.value);
            if (!(v >> p.a >> p.b)) fail_line(id, l.number, "domain needs two numbers");
            std::string extra;
            if (v >> extra) fail_line(id, l.number, "domain needs exactly two numbers");
            if (!(p.a < p.b)) fail_line(id, l.number, "domain must satisfy a < b");
        } else if (l.key == "conditions") {
            if (saw_conditions) fail_line(id, l.number, "duplicate conditions key");
            saw_conditions = true;
            std::istringstream v(l.value);
            std::string kind;
            if (!(v >> kind >> p.conditions.first >> p.conditions.second))
                fail_line(id, l.number, "conditions need a kind and two numbers");
            if (kind == "ivp") {
                p.conditions.kind = ConditionKind::Ivp;
            } else if (kind == "bvp") {
                p.conditions.kind = ConditionKind::Bvp;
            } else {
                fail_line(id, l.number, "condition kind must be ivp or bvp");
            }
        } else if (l.key == "exact") {
            if (l.value != "example1" && l.value != "bratu1" && l.value != "bratu2")
                fail_line(id, l.number, "unknown exact solution id '" + l.value + "'");
            p.exact = l.value;
        } else {
            fail_line(id, l.number, "unknown key '" + l.key + "'");
        }
    }

    if (!saw_domain) throw Error(id + ": missing domain");
    if (!saw_conditions) throw Error(id + ": missing conditions");
    if (!p.nonlinearity) p.nonlinearity = constant(0.0);
    return p;
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();

    // Report errors under the file's basename.
    std::size_t slash = path.find_last_of('/');
    std::string id = slash == std::string::npos ? path : path.substr(slash + 1);
    if (id.size() > 5 && id.compare(id.size() - 5, 5, ".prob") == 0)
        id.erase(id.size() - 5);
    return parse_problem_text(buf.str(), id);
}

}  // namespace opim
