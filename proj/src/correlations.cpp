#include "relepr/correlations.hpp"

#include <array>
#include <sstream>

#include "relepr/errors.hpp"
#include "relepr/kinematics.hpp"

namespace relepr {
namespace {

struct ModelName {
    ModelKind kind;
    std::string_view name;
};

constexpr std::array<ModelName, 7> kNames{{
    {ModelKind::pf_exact, "pf-exact"},
    {ModelKind::pf_small_u, "pf-small-u"},
    {ModelKind::pf_same_frame, "pf-same-frame"},
    {ModelKind::nw_half, "nw-half"},
    {ModelKind::cm_half, "cm-half"},
    {ModelKind::nw_one, "nw-one"},
    {ModelKind::cm_one, "cm-one"},
}};

// v_A = -v_B within this absolute tolerance counts as the pair rest frame.
constexpr double kRestFrameTolerance = 1e-12;

const Velocity& rest_frame_velocity(const Frames& f)
{
    const Vec3 sum = f.v_a.vec() + f.v_b.vec();
    if (std::abs(sum.x) > kRestFrameTolerance || std::abs(sum.y) > kRestFrameTolerance ||
        std::abs(sum.z) > kRestFrameTolerance) {
        throw DomainError("spin-1 correlations require the pair rest frame (v_A = -v_B), got v_A = " +
                          to_string(f.v_a.vec()) + ", v_B = " + to_string(f.v_b.vec()));
    }
    return f.v_a;
}

}  // namespace

std::string_view to_string(Spin spin) { return spin == Spin::half ? "half" : "one"; }

Model::Model(ModelKind kind, Spin spin) : Model(kind)
{
    if (kind == ModelKind::pf_same_frame) {
        spin_ = spin;
    } else if (spin != spin_) {
        throw UsageError("model " + name() + " is spin-" + std::string(to_string(spin_)) + " only");
    }
}

std::string Model::name() const
{
    for (const auto& entry : kNames) {
        if (entry.kind == kind_) {
            std::string n(entry.name);
            if (kind_ == ModelKind::pf_same_frame && spin_ == Spin::one) n += "-one";
            return n;
        }
    }
    return "unknown";
}

Model Model::parse(std::string_view name, std::optional<Spin> spin)
{
    if (name == "pf-same-frame-one") return Model::baseline(Spin::one);
    for (const auto& entry : kNames) {
        if (entry.name == name) return spin ? Model(entry.kind, *spin) : Model(entry.kind);
    }
    throw UsageError("unknown model '" + std::string(name) + "'");
}

double pf_exact(const PfGeometry& g)
{
    const WignerResult w = wigner_rotation(g.u_a, g.v_rel);
    return -dot(g.a.vec(), w.rotation.transpose() * g.b.vec());
}

double pf_small_u(const Direction& a, const Direction& b, const Velocity& u_a, const Velocity& u_b)
{
    if (u_a.speed() > kSmallUWarnSpeed || u_b.speed() > kSmallUWarnSpeed) {
        std::ostringstream msg;
        msg << "pf-small-u used with |u_A| = " << u_a.speed() << ", |u_B| = " << u_b.speed()
            << "; the expansion assumes |u| << 1";
        warn(msg.str());
    }
    return -dot(a.vec(), b.vec()) - dot(cross(a.vec(), b.vec()), cross(u_a.vec(), u_b.vec())) / 2.0;
}

double pf_same_frame(const Direction& a, const Direction& b, Spin spin)
{
    const double ab = dot(a.vec(), b.vec());
    return spin == Spin::half ? -ab : -2.0 * ab / 3.0;
}

double half_nw(const PairGeometry& g)
{
    const Vec3& a = g.a;
    const Vec3& b = g.b;
    const Vec3& va = g.v_a;
    const Vec3& vb = g.v_b;
    const double ra = std::sqrt(1.0 - norm2(va));
    const double rb = std::sqrt(1.0 - norm2(vb));

    const Vec3 lead = cross(va, vb) / (1.0 - dot(va, vb) + ra * rb);
    const Vec3 inner = cross(a, b) + (dot(a, va) * cross(b, vb) - dot(b, vb) * cross(a, va)) /
                                         ((1.0 + ra) * (1.0 + rb));
    return -dot(a, b) + dot(lead, inner);
}

double half_cm(const PairGeometry& g)
{
    const Vec3& a = g.a;
    const Vec3& b = g.b;
    const Vec3& va = g.v_a;
    const Vec3& vb = g.v_b;
    const double ra = std::sqrt(1.0 - norm2(va));
    const double rb = std::sqrt(1.0 - norm2(vb));
    const double ava = dot(a, va);
    const double bvb = dot(b, vb);

    const Vec3 s = va * rb + vb * ra;
    const double pair = 1.0 - dot(va, vb) + ra * rb;
    const double braced = -dot(a, b) * ra * rb + ava * bvb - dot(a, s) * dot(b, s) / pair;
    const double norm_a = std::sqrt(1.0 - norm2(va) + ava * ava);
    const double norm_b = std::sqrt(1.0 - norm2(vb) + bvb * bvb);
    return braced / (norm_a * norm_b);
}

double one_nw(const Direction& a, const Direction& b, const Velocity& v)
{
    const double v2 = norm2(v.vec());
    const double pre = 2.0 * (1.0 - v2) / (3.0 - 2.0 * v2 + 3.0 * v2 * v2);
    return pre * (-dot(a.vec(), b.vec()) * (1.0 + v2) + 2.0 * dot(a.vec(), v.vec()) * dot(b.vec(), v.vec()));
}

double one_cm(const Direction& a, const Direction& b, const Velocity& v)
{
    const double v2 = norm2(v.vec());
    const double av = dot(a.vec(), v.vec());
    const double bv = dot(b.vec(), v.vec());
    const double qa = 1.0 - v2 + av * av;
    const double qb = 1.0 - v2 + bv * bv;
    if (qa < kOneCmSingularity || qb < kOneCmSingularity) {
        throw DomainError("cm-one is numerically singular at |v| = " + std::to_string(std::sqrt(v2)) +
                          " with an axis orthogonal to v");
    }
    const double pre = 2.0 * (1.0 - v2) * (1.0 - v2) / (3.0 - 2.0 * v2 + 3.0 * v2 * v2);
    return pre * (-dot(a.vec(), b.vec()) * (1.0 + v2) + av * bv) / std::sqrt(qa * qb);
}

double correlation(const Model& model, const Geometry& g)
{
    switch (model.kind()) {
    case ModelKind::pf_exact:
        return pf_exact(g.pf());
    case ModelKind::pf_small_u: {
        const Velocity u_b = wigner_rotation(g.frames.u_a, g.frames.v_rel).u_b;
        return pf_small_u(g.a, g.b, g.frames.u_a, u_b);
    }
    case ModelKind::pf_same_frame:
        return pf_same_frame(g.a, g.b, model.spin());
    case ModelKind::nw_half:
        return half_nw(g.pair());
    case ModelKind::cm_half:
        return half_cm(g.pair());
    case ModelKind::nw_one:
        return one_nw(g.a, g.b, rest_frame_velocity(g.frames));
    case ModelKind::cm_one:
        return one_cm(g.a, g.b, rest_frame_velocity(g.frames));
    }
    throw UsageError("unhandled model");
}

double baseline_correlation(const Model& model, const Direction& a, const Direction& b)
{
    return pf_same_frame(a, b, model.spin());
}

double deviation(const Model& model, const Geometry& g)
{
    return correlation(model, g) - baseline_correlation(model, g.a, g.b);
}

double model_gap(const Model& first, const Model& second, const Geometry& g)
{
    if (first.spin() != second.spin()) {
        throw UsageError("model_gap needs one spin sector, got " + first.name() + " and " +
                         second.name());
    }
    return correlation(first, g) - correlation(second, g);
}

}  // namespace relepr
