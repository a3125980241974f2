#include "tessera/benchmarks.hpp"

#include "tessera/gauss.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace tessera::bench {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vector make_t2(std::initializer_list<double> vals) {
    Vector t(static_cast<int>(vals.size()));
    int i = 0;
    for (double v : vals) t(i++) = v;
    return t;
}

Benchmark four_branch() {
    Benchmark b;
    b.name = "four_branch";
    b.nvar = 2;
    b.space = transforms::ProbabilitySpace::standard_gaussian(2);
    b.g = [](const Vector& x) {
        const double s = (x(0) + x(1)) / std::sqrt(2.0);
        const double d = 0.1 * (x(0) - x(1)) * (x(0) - x(1));
        double g1 = 3.0 + d - s;
        double g2 = 3.0 + d + s;
        double g3 = x(0) - x(1) + 7.0 / std::sqrt(2.0);
        double g4 = x(1) - x(0) + 7.0 / std::sqrt(2.0);
        return std::min(std::min(g1, g2), std::min(g3, g4));
    };
    b.ref = {2.22e-3, "series-system exact value", make_t2({0.5, 0.5})};
    return b;
}

Benchmark piecewise() {
    Benchmark b;
    b.name = "piecewise";
    b.nvar = 2;
    b.space = transforms::ProbabilitySpace::standard_gaussian(2);
    b.g = [](const Vector& x) {
        double g1 = x(0) <= 3.5 ? 0.85 - x(0) / 10.0 : 4.0 - x(0);
        double g2 = x(1) <= 2.0 ? 2.3 - x(1) : 0.50 - x(1) / 10.0;
        return std::min(g1, g2);
    };
    // failure iff x1 >= 4 or x2 >= 5
    double p1 = gauss::std_normal_sf(4.0), p2 = gauss::std_normal_sf(5.0);
    double t = gauss::std_normal_pdf(4.0) * gauss::std_normal_cdf(5.0) +
               gauss::std_normal_pdf(5.0) * gauss::std_normal_cdf(4.0);
    b.ref = {p1 + p2 - p1 * p2, "analytic (two orthogonal half-spaces)",
             make_t2({gauss::std_normal_pdf(4.0) * gauss::std_normal_cdf(5.0) / t,
                      gauss::std_normal_pdf(5.0) * gauss::std_normal_cdf(4.0) / t})};
    return b;
}

Benchmark invariance(bool logistic) {
    Benchmark b;
    b.name = logistic ? "invariance_logistic" : "invariance_linear";
    b.nvar = 2;
    b.space = transforms::ProbabilitySpace::standard_gaussian(2);
    if (logistic) {
        b.g = [](const Vector& x) {
            double g1 = 5.0 - x(0);
            double g2 = 1.0 / (1.0 + std::exp(-2.0 * x(1) - 8.0)) - 0.5;
            return std::min(g1, g2);
        };
    } else {
        b.g = [](const Vector& x) { return std::min(5.0 - x(0), 4.0 + x(1)); };
    }
    double p1 = gauss::std_normal_sf(5.0), p2 = gauss::std_normal_sf(4.0);
    double t = gauss::std_normal_pdf(5.0) * gauss::std_normal_cdf(4.0) +
               gauss::std_normal_pdf(4.0) * gauss::std_normal_cdf(5.0);
    b.ref = {p1 + p2 - p1 * p2, "analytic (two orthogonal half-spaces)",
             make_t2({gauss::std_normal_pdf(5.0) * gauss::std_normal_cdf(4.0) / t,
                      gauss::std_normal_pdf(4.0) * gauss::std_normal_cdf(5.0) / t})};
    return b;
}

Benchmark product() {
    Benchmark b;
    b.name = "product";
    b.nvar = 2;
    b.space = transforms::ProbabilitySpace::standard_gaussian(2);
    b.g = [](const Vector& x) { return 30.0 / 2.0 - std::fabs(x(0) * x(1)); };
    b.ref = {6.064e-8, "Bessel-based closed form", make_t2({0.5, 0.5})};
    return b;
}

Benchmark metaball() {
    Benchmark b;
    b.name = "metaball";
    b.nvar = 2;
    b.space = transforms::ProbabilitySpace::standard_gaussian(2);
    b.g = [](const Vector& x) {
        double a = 4.0 * (x(0) + 2.0) * (x(0) + 2.0) / 9.0 + x(1) * x(1) / 25.0;
        double c = (x(0) - 2.5) * (x(0) - 2.5) / 4.0 + (x(1) - 0.5) * (x(1) - 0.5) / 25.0;
        return 30.0 / (a * a + 1.0) + 20.0 / (c * c + 1.0) - 5.0;
    };
    b.ref = {1.12857e-5, "reference analysis", make_t2({0.987, 0.013})};
    return b;
}

Benchmark v_band() {
    Benchmark b;
    b.name = "v_band";
    b.nvar = 2;
    b.space = transforms::ProbabilitySpace::standard_gaussian(2);
    b.g = [](const Vector& x) {
        double dx = x(0) + 1.8, dy = x(1) - 1.0;
        double rho = std::hypot(dx, dy);
        double phi = std::atan2(dy, dx);
        return rho * std::fabs(10.0 - 11.0 * std::cos(phi - kPi / 4.0)) - 1.0;
    };
    b.ref = {5.985e-3, "crude Monte Carlo, 1e8 samples (this artifact)",
             make_t2({0.266, 0.734})};
    return b;
}

Benchmark circle_closed() {
    Benchmark b;
    b.name = "circle_closed";
    b.nvar = 2;
    b.space = transforms::ProbabilitySpace::standard_gaussian(2);
    // closed failure disk in a high-density region; adversarial by design:
    // the exploratory phase may encapsulate it inside safe simplices
    b.g = [](const Vector& x) {
        double dx = x(0) - 1.0, dy = x(1) - 1.0;
        return dx * dx + dy * dy - 0.4 * 0.4;
    };
    b.ref = {2.846e-2, "crude Monte Carlo, 1e8 samples (this artifact)", std::nullopt};
    return b;
}

Benchmark rastrigin() {
    Benchmark b;
    b.name = "rastrigin";
    b.nvar = 2;
    b.space = transforms::ProbabilitySpace::standard_gaussian(2);
    b.g = [](const Vector& x) {
        double s = 0.0;
        for (int i = 0; i < 2; ++i) s += x(i) * x(i) - 5.0 * std::cos(2.0 * kPi * x(i));
        return 10.0 - s;
    };
    b.ref = {7.34e-2, "reference analysis", make_t2({0.5, 0.5})};
    return b;
}

Benchmark suspension_3d() {
    Benchmark b;
    b.name = "suspension_3d";
    b.nvar = 3;
    b.space = transforms::ProbabilitySpace::independent(
        {transforms::Marginal::normal(431.7221, 10.0),
         transforms::Marginal::normal(1475.5503, 10.0),
         transforms::Marginal::normal(55.0406, 10.0)});
    b.g = [](const Vector& x) {
        const double a = 0.15915, b0 = 0.27, vv = 10.0, mm = 3.2633, m = 0.8158, grav = 981.0;
        const double c = x(0), ck = x(1), k = x(2);
        double t1 = ck / (m + mm) - c / mm;
        double g1 = 1.0 - kPi * m * vv * a / (b0 * k * grav * grav) *
                              (t1 * t1 + c * c / (m * mm) + ck * k * k / (m * mm * mm));
        double g2 = 4000.0 * c * std::pow(mm * grav, -1.5) - 8.6394;
        double g3 = 2.0 * std::sqrt(mm * grav * (k * k * ck / (c * (m + mm)) + c)) - 1.0;
        double g4 = ck - std::pow(grav * (mm + m), 0.877);
        return std::min(std::min(g1, g2), std::min(g3, g4));
    };
    b.ref = {5.2e-4, "importance sampling, 1e6 samples (composite FORM 5.25001e-4)",
             make_t2({0.057, 0.943, 0.0})};
    return b;
}

Benchmark oscillator_5d() {
    Benchmark b;
    b.name = "oscillator_5d";
    b.nvar = 5;
    // {m, k~, r, t1, F1}; k~ merges the two spring stiffnesses
    b.space = transforms::ProbabilitySpace::independent(
        {transforms::Marginal::normal(1.0, 0.05),
         transforms::Marginal::normal(1.1, std::sqrt(0.0101)),
         transforms::Marginal::normal(0.5, 0.05),
         transforms::Marginal::normal(1.0, 0.2),
         transforms::Marginal::normal(0.45, 0.075)});
    b.g = [](const Vector& x) {
        const double m = x(0), k = x(1), r = x(2), t1 = x(3), f1 = x(4);
        double w0 = std::sqrt(k / m);
        return 3.0 * r - std::fabs(2.0 * f1 / (m * w0 * w0) * std::sin(0.5 * w0 * t1));
    };
    b.ref = {1.57e-8, "importance sampling, 1e7 samples",
             make_t2({0.0069, 0.0836, 0.4526, 0.2464, 0.2105})};
    return b;
}

Benchmark nataf_linear() {
    Benchmark b;
    b.name = "nataf_linear";
    b.nvar = 2;
    Matrix corr(2, 2);
    corr << 1.0, -0.708, -0.708, 1.0;
    b.space = transforms::ProbabilitySpace(
        {transforms::Marginal::gumbel(0.0, 1.0), transforms::Marginal::weibull(1.0, 1.5)}, corr);
    b.g = [](const Vector& x) { return 7.0 - x(0) - 2.0 * x(1); };
    b.ref = {1.14e-3, "large-sample reference", make_t2({0.2, 0.8})};
    return b;
}

Benchmark nd_family(const std::string& name, int nvar) {
    if (nvar < 1) throw std::invalid_argument(name + ": nvar required");
    constexpr double kPf = 1e-6;
    Benchmark b;
    b.name = name;
    b.nvar = nvar;
    b.space = transforms::ProbabilitySpace::standard_gaussian(nvar);
    b.ref = {kPf, "by construction", std::nullopt};
    if (name == "g_lin") {
        double c = gauss::inv_std_normal_cdf(kPf) * std::sqrt(static_cast<double>(nvar));
        b.g = [c](const Vector& x) { return x.sum() - c; };
    } else if (name == "g_min") {
        // high-precision threshold: 1-(1-pf)^(1/n) via expm1/log1p
        double q = -std::expm1(std::log1p(-kPf) / nvar);
        double c = gauss::inv_std_normal_cdf(q);
        b.g = [c](const Vector& x) { return x.minCoeff() - c; };
    } else if (name == "g_max") {
        double c = gauss::inv_std_normal_cdf(std::exp(std::log(kPf) / nvar));
        b.g = [c](const Vector& x) { return x.maxCoeff() - c; };
    } else if (name == "g_int") {
        double r = gauss::inv_chi_cdf(kPf, nvar);
        b.g = [r](const Vector& x) { return x.squaredNorm() - r * r; };
    } else if (name == "g_out") {
        double r = gauss::inv_chi_sf(kPf, nvar);
        b.g = [r](const Vector& x) { return r * r - x.squaredNorm(); };
    } else {
        throw std::invalid_argument("unknown family: " + name);
    }
    return b;
}

} // namespace

std::vector<std::string> benchmark_names() {
    return {"four_branch",  "piecewise", "invariance_linear", "invariance_logistic",
            "product",      "metaball",  "v_band",            "circle_closed",
            "rastrigin",    "suspension_3d", "oscillator_5d", "nataf_linear",
            "g_lin",        "g_min",     "g_max",             "g_int",
            "g_out"};
}

Benchmark make_benchmark(const std::string& name, int nvar) {
    if (name == "four_branch") return four_branch();
    if (name == "piecewise") return piecewise();
    if (name == "invariance_linear") return invariance(false);
    if (name == "invariance_logistic") return invariance(true);
    if (name == "product") return product();
    if (name == "metaball") return metaball();
    if (name == "v_band") return v_band();
    if (name == "circle_closed") return circle_closed();
    if (name == "rastrigin") return rastrigin();
    if (name == "suspension_3d") return suspension_3d();
    if (name == "oscillator_5d") return oscillator_5d();
    if (name == "nataf_linear") return nataf_linear();
    if (name == "g_lin" || name == "g_min" || name == "g_max" || name == "g_int" ||
        name == "g_out")
        return nd_family(name, nvar);
    throw std::invalid_argument("unknown benchmark: " + name);
}

Reference reference(const std::string& name, int nvar) { return make_benchmark(name, nvar).ref; }

// ---------------------------------------------------------------------------

ExternalLsf::ExternalLsf(std::string command, int nvar, bool binary_only)
    : command_(std::move(command)), nvar_(nvar), binary_only_(binary_only) {
    int to_pipe[2], from_pipe[2];
    if (pipe(to_pipe) != 0 || pipe(from_pipe) != 0)
        throw std::runtime_error("external lsf: pipe failed");
    pid_ = fork();
    if (pid_ < 0) throw std::runtime_error("external lsf: fork failed");
    if (pid_ == 0) {
        dup2(to_pipe[0], STDIN_FILENO);
        dup2(from_pipe[1], STDOUT_FILENO);
        close(to_pipe[0]);
        close(to_pipe[1]);
        close(from_pipe[0]);
        close(from_pipe[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_pipe[0]);
    close(from_pipe[1]);
    to_child_ = to_pipe[1];
    from_child_ = from_pipe[0];
}

ExternalLsf::~ExternalLsf() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    if (pid_ > 0) waitpid(pid_, nullptr, 0);
}

std::pair<double, Outcome> ExternalLsf::evaluate(const Vector& x) {
    if (x.size() != nvar_) throw std::invalid_argument("external lsf: dimension mismatch");
    std::ostringstream os;
    os.precision(17);
    for (int v = 0; v < nvar_; ++v) os << (v ? " " : "") << x(v);
    os << "\n";
    std::string line = os.str();
    if (write(to_child_, line.data(), line.size()) != static_cast<ssize_t>(line.size()))
        throw std::runtime_error("external lsf: write failed");

    std::string reply;
    char c;
    while (true) {
        auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            reply = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            break;
        }
        ssize_t n = read(from_child_, &c, 1);
        if (n <= 0) throw std::runtime_error("external lsf: model process closed the pipe");
        buffer_.push_back(c);
    }
    if (binary_only_) {
        int flag = std::stoi(reply);
        return {flag ? -1.0 : 1.0, flag ? Outcome::Failure : Outcome::Safe};
    }
    double g = std::stod(reply);
    return {g, g <= 0.0 ? Outcome::Failure : Outcome::Safe};
}

} // namespace tessera::bench
