#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "relepr/vec3.hpp"

namespace relepr {

enum class Spin { half, one };

std::string_view to_string(Spin spin);

enum class ModelKind {
    pf_exact,       // preferred frame, exact Wigner-rotated form
    pf_small_u,     // preferred frame, small PF-velocity expansion
    pf_same_frame,  // preferred frame, observers at rest in one frame
    nw_half,        // Newton-Wigner spin, spin 1/2
    cm_half,        // centre-of-mass spin, spin 1/2
    nw_one,         // Newton-Wigner spin, spin 1, pair rest frame
    cm_one,         // centre-of-mass spin, spin 1, pair rest frame
};

/// One of the seven correlation-function variants.
///
/// The relativistic kinds and the two moving-observer preferred-frame kinds
/// fix the spin sector; pf_same_frame is the baseline for either spin.
class Model {
public:
    constexpr Model(ModelKind kind) : kind_(kind), spin_(implied_spin(kind)) {}
    /// Throws UsageError if `spin` contradicts the kind.
    Model(ModelKind kind, Spin spin);

    static constexpr Model baseline(Spin spin)
    {
        Model m(ModelKind::pf_same_frame);
        m.spin_ = spin;
        return m;
    }

    constexpr ModelKind kind() const { return kind_; }
    constexpr Spin spin() const { return spin_; }
    constexpr bool preferred_frame() const
    {
        return kind_ == ModelKind::pf_exact || kind_ == ModelKind::pf_small_u ||
               kind_ == ModelKind::pf_same_frame;
    }

    /// CLI name, e.g. "nw-half", "pf-same-frame"; the spin-1 baseline is
    /// "pf-same-frame-one".
    std::string name() const;
    /// Inverse of name(); also accepts "pf-same-frame" with an explicit spin.
    static Model parse(std::string_view name, std::optional<Spin> spin = std::nullopt);

    friend constexpr bool operator==(const Model&, const Model&) = default;

private:
    static constexpr Spin implied_spin(ModelKind kind)
    {
        return (kind == ModelKind::nw_one || kind == ModelKind::cm_one) ? Spin::one : Spin::half;
    }
    ModelKind kind_;
    Spin spin_;
};

/// Velocity geometry shared by Alice and Bob.
///
/// `v_a`, `v_b` are the particle velocities (pair models); `u_a` is the
/// preferred-frame velocity seen by Alice and `v_rel` Bob's velocity relative
/// to Alice (preferred-frame models). Unused fields are ignored by a model.
struct Frames {
    Velocity v_a;
    Velocity v_b;
    Velocity u_a;
    Velocity v_rel;
};

struct PairGeometry {
    Direction a;
    Direction b;
    Velocity v_a;
    Velocity v_b;
};

struct PfGeometry {
    Direction a;
    Direction b;
    Velocity u_a;
    Velocity v_rel;
};

/// Two measurement axes together with the full velocity geometry.
struct Geometry {
    Direction a;
    Direction b;
    Frames frames;

    PairGeometry pair() const { return {a, b, frames.v_a, frames.v_b}; }
    PfGeometry pf() const { return {a, b, frames.u_a, frames.v_rel}; }
};

/// C = -a · Rᵀ b with R the Wigner rotation of (u_a, v_rel).
double pf_exact(const PfGeometry& g);

/// Small-velocity form C = -a·b - ((a×b)·(u_A×u_B))/2. Warns through the
/// warning sink when either speed exceeds kSmallUWarnSpeed.
double pf_small_u(const Direction& a, const Direction& b, const Velocity& u_a, const Velocity& u_b);
inline constexpr double kSmallUWarnSpeed = 0.1;

/// -a·b for spin 1/2, -(2/3) a·b for spin 1.
double pf_same_frame(const Direction& a, const Direction& b, Spin spin);

/// Spin-1/2 singlet correlation with the Newton-Wigner spin operator, for
/// observers at rest in one frame and particles with sharp velocities.
double half_nw(const PairGeometry& g);

/// Spin-1/2 singlet correlation with the centre-of-mass spin operator.
double half_cm(const PairGeometry& g);

/// Spin-1 correlations in the pair rest frame, v_A = -v_B = v.
double one_nw(const Direction& a, const Direction& b, const Velocity& v);
/// Throws DomainError when 1 - v² + (a·v)² or the b counterpart drops below
/// kOneCmSingularity.
double one_cm(const Direction& a, const Direction& b, const Velocity& v);
inline constexpr double kOneCmSingularity = 1e-14;

/// Dispatches to the model's formula. Spin-1 kinds require
/// frames.v_a = -frames.v_b (DomainError otherwise).
double correlation(const Model& model, const Geometry& g);

/// Same-frame preferred-frame value for the model's spin sector.
double baseline_correlation(const Model& model, const Direction& a, const Direction& b);

/// C_model - C_baseline.
double deviation(const Model& model, const Geometry& g);

/// C_first - C_second; UsageError when the spin sectors differ.
double model_gap(const Model& first, const Model& second, const Geometry& g);

}  // namespace relepr
