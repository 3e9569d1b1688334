#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlsnf/fourier_field.hpp"
#include "nlsnf/index_tuple.hpp"

namespace nlsnf {

struct Term {
  ClassKey key;
  cplx coef;
};

/// Relative pruning level applied to bracket outputs and tensor sums.
inline constexpr double kPruneRelative = 1e-15;

/// Sparse homogeneous multilinear form
///
///   sum_classes c(A, B) prod_{a in A} q_a prod_{b in B} conj(q_b)
///
/// of degree 2r, stored as canonical classes (odd multiset A, even multiset B)
/// sorted by key. Every stored class satisfies sum(A) == sum(B). Coefficients
/// are complex; tensors representing real Hamiltonians are reality symmetric
/// (c(B, A) == conj(c(A, B))), which is checked rather than assumed.
class HomogeneousHamiltonian {
 public:
  HomogeneousHamiltonian() = default;
  HomogeneousHamiltonian(int degree, int radius);

  /// Merges duplicate keys, drops exact zeros, sorts. Keys must already be
  /// canonical and balanced.
  static HomogeneousHamiltonian from_terms(int degree, int radius, std::vector<Term> terms);

  int degree() const { return degree_; }
  int half() const { return degree_ / 2; }
  int radius() const { return radius_; }
  std::span<const Term> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  cplx coefficient(const ClassKey& key) const;

  /// The complex conjugate functional: swaps odd/even and conjugates coefficients.
  HomogeneousHamiltonian conj() const;
  HomogeneousHamiltonian scaled(cplx a) const;
  HomogeneousHamiltonian with_radius(int radius) const;

  double max_abs() const;
  /// Sum of |c| over classes, equal to the l1 mass of the symmetrized raw tensor.
  double l1_mass() const;
  bool is_reality_symmetric(double rel_tol = 1e-12) const;

  nlohmann::json to_json() const;
  static HomogeneousHamiltonian from_json(const nlohmann::json& j);

  friend HomogeneousHamiltonian operator+(const HomogeneousHamiltonian& a, const HomogeneousHamiltonian& b);
  friend HomogeneousHamiltonian operator-(const HomogeneousHamiltonian& a, const HomogeneousHamiltonian& b);

 private:
  int degree_ = 2;
  int radius_ = 0;
  std::vector<Term> terms_;
};

/// Accumulates coefficients per class before freezing into a tensor.
class TensorBuilder {
 public:
  TensorBuilder(int degree, int radius);
  void add(const ClassKey& key, cplx c);
  void add_tuple(std::span<const int> tuple, cplx c);
  std::size_t size() const { return acc_.size(); }
  HomogeneousHamiltonian build() &&;

 private:
  int degree_, radius_;
  std::unordered_map<ClassKey, cplx, ClassKeyHash> acc_;
};

/// Quadratic form sum_n w_n |q_n|^2 over |n| <= M.
struct QuadraticPart {
  int radius = 0;
  std::vector<double> weights;  // index n + radius

  double operator()(int n) const {
    return (n < -radius || n > radius) ? 0.0 : weights[static_cast<std::size_t>(n + radius)];
  }
};

/// Default weights n^2 (the free Schroedinger part H0).
QuadraticPart make_quadratic(int radius);
QuadraticPart make_quadratic(int radius, std::vector<double> weights);
/// Weights n^2 + 2 mu.
QuadraticPart make_shifted_quadratic(int radius, double mu);

enum class PieceTag { Resonant, Nonresonant, Remainder };
std::string to_string(PieceTag tag);
PieceTag piece_tag_from_string(const std::string& s);

struct TaggedPiece {
  HomogeneousHamiltonian tensor;
  PieceTag tag;
};

/// Quadratic weights plus tagged homogeneous pieces; K is the resonance
/// threshold the tags refer to.
struct HamiltonianSum {
  QuadraticPart quadratic;
  std::vector<TaggedPiece> pieces;
  double K = 0.0;

  int radius() const { return quadratic.radius; }
};

/// sum_{|n|<=M} |q_n|^2 as a degree-2 tensor.
HomogeneousHamiltonian make_mass_tensor(int radius);
/// Degree 2p+2 form with raw coefficient 1 on every zero-alternating-sum tuple.
HomogeneousHamiltonian make_nls_nonlinearity(int p, int radius);

cplx evaluate_complex(const HomogeneousHamiltonian& h, const FourierField& q);
/// Real value; throws RealityViolation when |Im| > 1e-10 * sum |c * monomial| + 1e-14.
double evaluate(const HomogeneousHamiltonian& h, const FourierField& q);
double evaluate(const QuadraticPart& h, const FourierField& q);
double evaluate(const HamiltonianSum& h, const FourierField& q);

/// dH/d(conj q_n) and dH/dq_n as fields on the tensor's lattice.
FourierField gradient_bar(const HomogeneousHamiltonian& h, const FourierField& q);
FourierField gradient_unbar(const HomogeneousHamiltonian& h, const FourierField& q);
FourierField gradient_bar(const QuadraticPart& h, const FourierField& q);
FourierField gradient_unbar(const QuadraticPart& h, const FourierField& q);
FourierField gradient_bar(const HamiltonianSum& h, const FourierField& q);
FourierField gradient_unbar(const HamiltonianSum& h, const FourierField& q);

struct BracketOptions {
  int max_degree = kMaxDegree;
  int threads = 0;  // 0: NLSNF_THREADS or 1
};

struct BracketResult {
  HomogeneousHamiltonian value;                  // empty (of the result degree) when the result overflowed
  std::optional<HomogeneousHamiltonian> overflow;  // set when degree > max_degree
  double pruned_mass = 0.0;
};

/// {H1, H2} = i sum_n [dH1/dq_n dH2/dconj(q_n) - dH1/dconj(q_n) dH2/dq_n].
BracketResult poisson_bracket(const HomogeneousHamiltonian& h1, const HomogeneousHamiltonian& h2,
                              const BracketOptions& opt = {});
/// Uncapped bracket.
HomogeneousHamiltonian bracket(const HomogeneousHamiltonian& h1, const HomogeneousHamiltonian& h2);
/// {Q, G} = -i D_w(A, B) G classwise, D_w = sum_A w - sum_B w.
HomogeneousHamiltonian bracket(const QuadraticPart& q, const HomogeneousHamiltonian& g);
HomogeneousHamiltonian bracket(const HomogeneousHamiltonian& g, const QuadraticPart& q);

/// Certified upper bound on l1_mass({A, F}) from per-frequency marginals,
/// without materializing the bracket.
double bracket_mass_bound(const HomogeneousHamiltonian& a, const HomogeneousHamiltonian& f);
/// Upper bound on l1_mass({X, F}) given only deg X and l1_mass(X).
double bracket_mass_bound(int degree_x, double mass_x, const HomogeneousHamiltonian& f);

/// Partition by |D| <= K (first) versus |D| > K (second).
std::pair<HomogeneousHamiltonian, HomogeneousHamiltonian> split_resonant(const HomogeneousHamiltonian& h, double K);

/// Generator F with coefficient c / (i D) per class, so that {H0, F} = -H.
/// Throws ResonantClassError on any class with D == 0.
HomogeneousHamiltonian homological_solve(const HomogeneousHamiltonian& h);
/// Same with divisor i * D_w for general quadratic weights, so that {Q, F} = -H.
HomogeneousHamiltonian homological_solve(const QuadraticPart& q, const HomogeneousHamiltonian& h);

int default_threads();

}  // namespace nlsnf
