#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/network.hpp"

#include <cmath>
#include <string>

namespace nnbisim {

enum class NormKind { Linf, L2 };

inline const char* to_string(NormKind n) noexcept { return n == NormKind::Linf ? "inf" : "l2"; }

inline NormKind parse_norm(const std::string& s)
{
    if (s == "inf" || s == "linf" || s == "Linf")
        return NormKind::Linf;
    if (s == "l2" || s == "L2" || s == "2")
        return NormKind::L2;
    throw ArgumentError("unknown norm '" + s + "' (expected inf or l2)");
}

inline double vector_norm(const Vector& v, NormKind norm)
{
    if (v.size() == 0)
        return 0.0;
    return norm == NormKind::Linf ? v.lpNorm<Eigen::Infinity>() : v.norm();
}

/// Dual norm: L1 for Linf, L2 for L2.
inline double dual_norm(const Vector& v, NormKind norm)
{
    return norm == NormKind::Linf ? v.lpNorm<1>() : v.norm();
}

/// sup of the norm over a box. Exact for Linf and for L2, since both are
/// maximized at the vertex picking the larger |bound| per coordinate.
inline double box_sup_norm(const Box& b, NormKind norm)
{
    const Vector extreme = b.lower().cwiseAbs().cwiseMax(b.upper().cwiseAbs());
    return vector_norm(extreme, norm);
}

} // namespace nnbisim
