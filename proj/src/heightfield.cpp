#include "covsim/heightfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace covsim {

struct HeightField::Impl {
  DomainRect domain;
  FieldKind kind;

  Impl(const DomainRect& d, FieldKind k) : domain(d), kind(k) {}
  virtual ~Impl() = default;
  virtual double eval(double x, double y) const = 0;
};

namespace {

struct FlatImpl final : HeightField::Impl {
  double z;
  FlatImpl(const DomainRect& d, double z_) : Impl(d, FieldKind::Flat), z(z_) {}
  double eval(double, double) const override { return z; }
};

struct MixtureImpl final : HeightField::Impl {
  std::vector<GaussianComponent> components;
  double base;

  MixtureImpl(const DomainRect& d, std::vector<GaussianComponent> c, double b)
      : Impl(d, FieldKind::GaussianMixture), components(std::move(c)), base(b) {}

  double eval(double x, double y) const override {
    double z = base;
    for (const auto& g : components) {
      const double dx = x - g.center.x();
      const double dy = y - g.center.y();
      z += g.peak * std::exp(-(dx * dx + dy * dy) / (2.0 * g.sigma * g.sigma));
    }
    return z;
  }
};

struct GridImpl final : HeightField::Impl {
  Eigen::MatrixXd z;  // ny x nx, node lattice spanning the domain
  double dx, dy;

  GridImpl(const DomainRect& d, Eigen::MatrixXd z_)
      : Impl(d, FieldKind::ExternalGrid), z(std::move(z_)) {
    dx = d.width() / double(z.cols() - 1);
    dy = d.height() / double(z.rows() - 1);
  }

  double eval(double x, double y) const override {
    const double fx = (x - domain.x_min) / dx;
    const double fy = (y - domain.y_min) / dy;
    const int j = std::clamp(int(std::floor(fx)), 0, int(z.cols()) - 2);
    const int i = std::clamp(int(std::floor(fy)), 0, int(z.rows()) - 2);
    const double u = std::clamp(fx - j, 0.0, 1.0);
    const double v = std::clamp(fy - i, 0.0, 1.0);
    return (1 - u) * (1 - v) * z(i, j) + u * (1 - v) * z(i, j + 1) +
           (1 - u) * v * z(i + 1, j) + u * v * z(i + 1, j + 1);
  }
};

// Uniform bucket index over triangle bounding boxes; point location tests
// only the triangles whose bbox overlaps the query's bucket.
struct PlfImpl final : HeightField::Impl {
  PlfData data;
  int grid_n{1};
  double inv_bw{1.0}, inv_bh{1.0};
  std::vector<std::vector<int>> buckets;

  PlfImpl(const DomainRect& d, PlfData data_)
      : Impl(d, FieldKind::PiecewiseLinear), data(std::move(data_)) {
    grid_n = std::max(1, int(std::ceil(std::sqrt(double(data.triangles.size())))));
    inv_bw = grid_n / domain.width();
    inv_bh = grid_n / domain.height();
    buckets.assign(std::size_t(grid_n) * grid_n, {});
    for (int t = 0; t < int(data.triangles.size()); ++t) {
      const auto& tri = data.triangles[t];
      double x0 = domain.x_max, x1 = domain.x_min, y0 = domain.y_max, y1 = domain.y_min;
      for (int v : tri) {
        x0 = std::min(x0, data.vertices[v].x());
        x1 = std::max(x1, data.vertices[v].x());
        y0 = std::min(y0, data.vertices[v].y());
        y1 = std::max(y1, data.vertices[v].y());
      }
      const int jx0 = bucket_of(x0, domain.x_min, inv_bw);
      const int jx1 = bucket_of(x1, domain.x_min, inv_bw);
      const int jy0 = bucket_of(y0, domain.y_min, inv_bh);
      const int jy1 = bucket_of(y1, domain.y_min, inv_bh);
      for (int jy = jy0; jy <= jy1; ++jy)
        for (int jx = jx0; jx <= jx1; ++jx)
          buckets[std::size_t(jy) * grid_n + jx].push_back(t);
    }
  }

  int bucket_of(double v, double lo, double inv) const {
    return std::clamp(int((v - lo) * inv), 0, grid_n - 1);
  }

  // Signed twice-area of (a, b, p); positive when p is left of a->b.
  static double orient(const Vec3& a, const Vec3& b, double px, double py) {
    return (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
  }

  double eval(double x, double y) const override {
    const auto& cell =
        buckets[std::size_t(bucket_of(y, domain.y_min, inv_bh)) * grid_n +
                bucket_of(x, domain.x_min, inv_bw)];
    const double tol = -1e-9 * (domain.width() + domain.height());
    int best = -1;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (int t : cell) {
      const auto& tri = data.triangles[t];
      const Vec3& a = data.vertices[tri[0]];
      const Vec3& b = data.vertices[tri[1]];
      const Vec3& c = data.vertices[tri[2]];
      const double m =
          std::min({orient(a, b, x, y), orient(b, c, x, y), orient(c, a, x, y)});
      if (m >= tol) return plane_eval(t, x, y);
      if (m > best_margin) {
        best_margin = m;
        best = t;
      }
    }
    if (best >= 0) return plane_eval(best, x, y);
    // Empty bucket can only happen from degenerate float rounding at the
    // domain edge; fall back to a full scan.
    for (int t = 0; t < int(data.triangles.size()); ++t) {
      const auto& tri = data.triangles[t];
      const Vec3& a = data.vertices[tri[0]];
      const Vec3& b = data.vertices[tri[1]];
      const Vec3& c = data.vertices[tri[2]];
      const double m =
          std::min({orient(a, b, x, y), orient(b, c, x, y), orient(c, a, x, y)});
      if (m > best_margin) {
        best_margin = m;
        best = t;
      }
    }
    return plane_eval(best, x, y);
  }

  double plane_eval(int t, double x, double y) const {
    const Vec3& p = data.planes[t];
    return p.x() * x + p.y() * y + p.z();
  }
};

}  // namespace

HeightField::HeightField()
    : impl_(std::make_shared<FlatImpl>(DomainRect{0, 1, 0, 1}, 0.0)) {}

double HeightField::operator()(double x, double y) const {
  const DomainRect& d = impl_->domain;
  return impl_->eval(std::clamp(x, d.x_min, d.x_max), std::clamp(y, d.y_min, d.y_max));
}

const DomainRect& HeightField::domain() const { return impl_->domain; }
FieldKind HeightField::kind() const { return impl_->kind; }

void GaussianMixtureSpec::validate() const {
  domain.validate();
  for (const auto& g : components) {
    if (g.peak < 0) throw std::invalid_argument("GaussianMixtureSpec: peak height must be >= 0");
    if (!(g.sigma > 0)) throw std::invalid_argument("GaussianMixtureSpec: sigma must be > 0");
    if (!domain.contains(g.center.x(), g.center.y()))
      throw std::invalid_argument("GaussianMixtureSpec: component center outside domain");
  }
}

HeightField flat_field(const DomainRect& domain, double z) {
  domain.validate();
  return HeightField(std::make_shared<FlatImpl>(domain, z));
}

HeightField generate_terrain(const GaussianMixtureSpec& spec) {
  spec.validate();
  return HeightField(std::make_shared<MixtureImpl>(spec.domain, spec.components, spec.base));
}

GaussianMixtureSpec random_mixture_spec(const DomainRect& domain, std::uint64_t seed,
                                        const TerrainRandomParams& params) {
  domain.validate();
  if (params.n_components < 0)
    throw std::invalid_argument("random_mixture_spec: n_components must be >= 0");
  if (!(params.sigma > 0)) throw std::invalid_argument("random_mixture_spec: sigma must be > 0");
  if (params.peak_min < 0 || params.peak_max < params.peak_min)
    throw std::invalid_argument("random_mixture_spec: need 0 <= peak_min <= peak_max");

  GaussianMixtureSpec spec;
  spec.domain = domain;
  spec.base = params.base;
  spec.seed = seed;
  RngEngine rng = make_rng(seed);
  std::uniform_real_distribution<double> ux(domain.x_min, domain.x_max);
  std::uniform_real_distribution<double> uy(domain.y_min, domain.y_max);
  std::uniform_real_distribution<double> up(params.peak_min, params.peak_max);
  spec.components.reserve(std::size_t(params.n_components));
  for (int i = 0; i < params.n_components; ++i) {
    GaussianComponent g;
    g.center = Vec2(ux(rng), uy(rng));
    g.peak = up(rng);
    g.sigma = params.sigma;
    spec.components.push_back(g);
  }
  return spec;
}

HeightField grid_field(const DomainRect& domain, Eigen::MatrixXd z) {
  domain.validate();
  if (z.rows() < 2 || z.cols() < 2)
    throw std::invalid_argument("grid_field: lattice needs at least 2x2 nodes");
  if (!z.allFinite()) throw std::invalid_argument("grid_field: non-finite height value");
  return HeightField(std::make_shared<GridImpl>(domain, std::move(z)));
}

HeightField piecewise_linear_field(const DomainRect& domain, PlfData data) {
  domain.validate();
  if (data.triangles.empty())
    throw std::invalid_argument("piecewise_linear_field: empty triangulation");
  if (data.planes.size() != data.triangles.size())
    throw std::invalid_argument("piecewise_linear_field: planes/triangles size mismatch");
  return HeightField(std::make_shared<PlfImpl>(domain, std::move(data)));
}

const PlfData* plf_data(const HeightField& field) {
  if (field.kind() != FieldKind::PiecewiseLinear) return nullptr;
  return &static_cast<const PlfImpl&>(field.impl()).data;
}

}  // namespace covsim
