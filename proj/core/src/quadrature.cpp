#include "dbbsim/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>

#include "dbbsim/errors.hpp"

namespace dbb {

namespace {

constexpr int kMaxDim = 4;

struct Region {
    std::array<double, kMaxDim> center{};
    std::array<double, kMaxDim> halfwidth{};
    double value = 0.0;
    double error = 0.0;
    int split_dim = 0;
    std::uint64_t id = 0;  // insertion order, for a deterministic heap
};

struct RegionCompare {
    bool operator()(const Region& a, const Region& b) const
    {
        if (a.error != b.error) return a.error < b.error;
        return a.id > b.id;
    }
};

// 15-point Kronrod extension of 7-point Gauss (abscissae/weights on [-1,1]).
// Even-indexed abscissae form the embedded Gauss rule.
constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr std::array<double, 4> kGaussW = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

// Gauss-Kronrod 7/15 on one interval.
void rule_gk15(const Integrand& f, Region& r)
{
    const double c = r.center[0];
    const double h = r.halfwidth[0];
    double gauss = 0.0;
    double kronrod = 0.0;
    std::array<double, 1> pt{};
    for (int i = 0; i < 8; ++i) {
        pt[0] = c + h * kKronrodX[i];
        double fi = f(pt);
        if (kKronrodX[i] != 0.0) {
            pt[0] = c - h * kKronrodX[i];
            fi += f(pt);
        }
        kronrod += kKronrodW[i] * fi;
        if (i % 2 == 1) gauss += kGaussW[i / 2] * fi;
    }
    r.value = kronrod * h;
    r.error = std::abs(kronrod - gauss) * h;
    r.split_dim = 0;
}

// Genz-Malik fully symmetric degree-7 rule with embedded degree-5 estimate,
// for dimension 2..4 on a box {center +- halfwidth}.
void rule_genz_malik(const Integrand& f, Region& r, int dim)
{
    const double l2 = std::sqrt(9.0 / 70.0);
    const double l3 = std::sqrt(9.0 / 10.0);
    const double l4 = l3;
    const double l5 = std::sqrt(9.0 / 19.0);

    double volume = 1.0;
    for (int i = 0; i < dim; ++i) volume *= 2.0 * r.halfwidth[i];

    const double w1 = volume * (12824.0 - 9120.0 * dim + 400.0 * dim * dim) / 19683.0;
    const double w2 = volume * 980.0 / 6561.0;
    const double w3 = volume * (1820.0 - 400.0 * dim) / 19683.0;
    const double w4 = volume * 200.0 / 19683.0;
    const double w5 = volume * (6859.0 / 19683.0) / static_cast<double>(1 << dim);
    const double e1 = volume * (729.0 - 950.0 * dim + 50.0 * dim * dim) / 729.0;
    const double e2 = volume * 245.0 / 486.0;
    const double e3 = volume * (265.0 - 100.0 * dim) / 1458.0;
    const double e4 = volume * 25.0 / 729.0;

    std::array<double, kMaxDim> pt{};
    auto reset = [&] {
        for (int i = 0; i < dim; ++i) pt[i] = r.center[i];
    };

    reset();
    const double fc = f(std::span<const double>(pt.data(), dim));

    double sum2 = 0.0;
    double sum3 = 0.0;
    std::array<double, kMaxDim> fourth_diff{};
    for (int i = 0; i < dim; ++i) {
        reset();
        pt[i] = r.center[i] + l2 * r.halfwidth[i];
        const double fp2 = f(std::span<const double>(pt.data(), dim));
        pt[i] = r.center[i] - l2 * r.halfwidth[i];
        const double fm2 = f(std::span<const double>(pt.data(), dim));
        pt[i] = r.center[i] + l3 * r.halfwidth[i];
        const double fp3 = f(std::span<const double>(pt.data(), dim));
        pt[i] = r.center[i] - l3 * r.halfwidth[i];
        const double fm3 = f(std::span<const double>(pt.data(), dim));
        sum2 += fp2 + fm2;
        sum3 += fp3 + fm3;
        // fourth divided difference along axis i drives the split choice
        const double ratio = (l2 * l2) / (l3 * l3);
        fourth_diff[i] = std::abs(fp2 + fm2 - 2.0 * fc - ratio * (fp3 + fm3 - 2.0 * fc));
    }

    double sum4 = 0.0;
    for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) {
            for (int si = -1; si <= 1; si += 2) {
                for (int sj = -1; sj <= 1; sj += 2) {
                    reset();
                    pt[i] = r.center[i] + si * l4 * r.halfwidth[i];
                    pt[j] = r.center[j] + sj * l4 * r.halfwidth[j];
                    sum4 += f(std::span<const double>(pt.data(), dim));
                }
            }
        }
    }

    double sum5 = 0.0;
    for (int corner = 0; corner < (1 << dim); ++corner) {
        for (int i = 0; i < dim; ++i) {
            const double s = (corner >> i) & 1 ? l5 : -l5;
            pt[i] = r.center[i] + s * r.halfwidth[i];
        }
        sum5 += f(std::span<const double>(pt.data(), dim));
    }

    const double degree7 = w1 * fc + w2 * sum2 + w3 * sum3 + w4 * sum4 + w5 * sum5;
    const double degree5 = e1 * fc + e2 * sum2 + e3 * sum3 + e4 * sum4;
    r.value = degree7;
    r.error = std::abs(degree7 - degree5);

    int split = 0;
    double best = -1.0;
    for (int i = 0; i < dim; ++i) {
        // prefer the largest fourth difference, then the widest axis
        if (fourth_diff[i] > best
            || (fourth_diff[i] == best && r.halfwidth[i] > r.halfwidth[split])) {
            best = fourth_diff[i];
            split = i;
        }
    }
    r.split_dim = split;
}

std::size_t rule_evaluations(int dim)
{
    if (dim == 1) return 15;
    return 1 + 4 * dim + 2 * dim * (dim - 1) + (std::size_t{1} << dim);
}

void apply_rule(const Integrand& f, Region& r, int dim)
{
    if (dim == 1) {
        rule_gk15(f, r);
    } else {
        rule_genz_malik(f, r, dim);
    }
}

}  // namespace

QuadratureResult try_integrate(const Integrand& f, std::span<const Interval> domain,
                               const QuadratureOptions& opt)
{
    const int dim = static_cast<int>(domain.size());
    if (dim < 1 || dim > kMaxDim) {
        throw std::invalid_argument("quadrature dimension must be 1..4");
    }

    Region root;
    for (int i = 0; i < dim; ++i) {
        root.center[i] = 0.5 * (domain[i].lo + domain[i].hi);
        root.halfwidth[i] = 0.5 * (domain[i].hi - domain[i].lo);
    }

    QuadratureResult out;
    apply_rule(f, root, dim);
    out.evaluations = rule_evaluations(dim);

    std::priority_queue<Region, std::vector<Region>, RegionCompare> heap;
    std::uint64_t next_id = 1;
    root.id = 0;
    heap.push(root);
    double total_value = root.value;
    double total_error = root.error;

    auto tolerance_met = [&] {
        return total_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total_value));
    };

    while (!tolerance_met() && !heap.empty()) {
        if (out.evaluations + 2 * rule_evaluations(dim) > opt.max_evaluations) {
            out.value = total_value;
            out.error_estimate = total_error;
            out.converged = false;
            return out;
        }
        Region parent = heap.top();
        heap.pop();
        total_value -= parent.value;
        total_error -= parent.error;

        const int d = parent.split_dim;
        Region left = parent;
        left.halfwidth[d] *= 0.5;
        left.center[d] = parent.center[d] - left.halfwidth[d];
        Region right = parent;
        right.halfwidth[d] *= 0.5;
        right.center[d] = parent.center[d] + right.halfwidth[d];

        apply_rule(f, left, dim);
        apply_rule(f, right, dim);
        left.id = next_id++;
        right.id = next_id++;
        out.evaluations += 2 * rule_evaluations(dim);

        total_value += left.value + right.value;
        total_error += left.error + right.error;
        heap.push(left);
        heap.push(right);
    }

    out.value = total_value;
    out.error_estimate = total_error;
    out.converged = true;
    return out;
}

double integrate(const Integrand& f, std::span<const Interval> domain,
                 const QuadratureOptions& opt)
{
    const QuadratureResult r = try_integrate(f, domain, opt);
    if (!r.converged) {
        throw QuadratureNonConvergence(r.value, r.error_estimate, r.evaluations);
    }
    return r.value;
}

}  // namespace dbb
