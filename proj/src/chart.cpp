#include "surfns/chart.hpp"

#include <cmath>

namespace surfns {

EmbeddingJet SphericalChartEmbedding::jet(double u, double v) const {
    const double su = std::sin(u), cu = std::cos(u);
    const double sv = std::sin(v), cv = std::cos(v);
    EmbeddingJet out;
    out.x = A_ * Vec3(su * cv, su * sv, cu);
    out.xu = A_ * Vec3(cu * cv, cu * sv, -su);
    out.xv = A_ * Vec3(-su * sv, su * cv, 0.0);
    out.xuu = A_ * Vec3(-su * cv, -su * sv, -cu);
    out.xuv = A_ * Vec3(-cu * sv, cu * cv, 0.0);
    out.xvv = A_ * Vec3(-su * cv, -su * sv, 0.0);
    return out;
}

EmbeddingJet TorusEmbedding::jet(double u, double v) const {
    const double su = std::sin(u), cu = std::cos(u);
    const double sv = std::sin(v), cv = std::cos(v);
    const double A = R_ + r_ * cv;
    EmbeddingJet out;
    out.x = Vec3(A * cu, A * su, r_ * sv);
    out.xu = Vec3(-A * su, A * cu, 0.0);
    out.xv = Vec3(-r_ * sv * cu, -r_ * sv * su, r_ * cv);
    out.xuu = Vec3(-A * cu, -A * su, 0.0);
    out.xuv = Vec3(r_ * sv * su, -r_ * sv * cu, 0.0);
    out.xvv = Vec3(-r_ * cv * cu, -r_ * cv * su, -r_ * sv);
    return out;
}

} // namespace surfns
