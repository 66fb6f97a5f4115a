#pragma once

#include <string>
#include <vector>

#include "fanlib/monoid.hpp"

namespace fanlib {

// A monoid map given by a homomorphism of the ambient groups that carries the source generators into the target.
class MonoidHom {
 public:
  MonoidHom() = default;
  MonoidHom(FineMonoid source, FineMonoid target, GroupHom map);
  static MonoidHom identity(const FineMonoid& p);

  const FineMonoid& source() const { return src_; }
  const FineMonoid& target() const { return tgt_; }
  const GroupHom& map() const { return map_; }
  Vec apply(const Vec& x) const { return map_.apply(x); }
  std::vector<Vec> image_gens() const;
  // (*this) after h.
  MonoidHom after(const MonoidHom& h) const;

 private:
  FineMonoid src_, tgt_;
  GroupHom map_;
};

// Induced map on unit groups, in their canonical coordinates.
GroupHom units_map(const MonoidHom& h);
// Induced map of the groups generated by the monoids, in their canonical coordinates.
GroupHom gp_map(const MonoidHom& h);
// For each face of the target, the index of its preimage among faces(source).
std::vector<std::size_t> spec_map(const MonoidHom& h);
bool spec_is_isomorphism(const MonoidHom& h);

bool is_local(const MonoidHom& h);
bool is_injective(const MonoidHom& h);
bool is_surjective(const MonoidHom& h);
bool is_isomorphism(const MonoidHom& h);
bool is_dense(const MonoidHom& h);
// Generators of the target as a module over the source; empty when the map is not finite.
std::vector<Vec> module_generators(const MonoidHom& h);
bool is_quasi_finite(const MonoidHom& h);
bool is_exact(const MonoidHom& h);
// Q is the full preimage of P under the map of groups.
bool is_cartesian(const MonoidHom& h);
bool is_localization(const MonoidHom& h);
IdealSaturation reducedness(const MonoidHom& h, std::optional<Int> bound = {});
MonoidHom sharpening(const MonoidHom& h);
// Unit representatives of P* / h(Q*) when h is CZE.
std::optional<std::vector<Vec>> cze_basis(const MonoidHom& h);

struct FlatCertificate {
  enum Kind { Flat, NotFlat, Unknown } kind = Unknown;
  std::string reason;
  std::vector<Vec> basis;
};
FlatCertificate flat_certificate(const MonoidHom& h);

struct HomProfile {
  bool local = false, injective = false, surjective = false, dense = false, finite = false;
  std::vector<Vec> module_gens;
  bool quasi_finite = false, exact = false;
  IdealSaturation reduced;
  bool cze = false;
  std::vector<Vec> cze_basis;
  FlatCertificate flat;
};
HomProfile classify_hom(const MonoidHom& h);

struct FiberPrimes {
  enum Kind { NotReducedAllPrimes, BadPrimes, Unknown } kind = BadPrimes;
  IdealSaturation witness;
  std::vector<Int> primes;
};
FiberPrimes reduced_fiber_primes(const MonoidHom& h);

struct QuotientResult {
  FineMonoid monoid;
  MonoidHom inclusion;
};
// Submonoid killed by a character a : ambient -> A with A finite.
QuotientResult quotient_by_character(const FineMonoid& p, const GroupHom& a);

MonoidHom cze_cover_basic(const FineMonoid& p, const GroupHom& u);

struct PushoutResult {
  FineMonoid monoid;
  MonoidHom left, right;
  bool certified = false;  // the plain monoid pushout is already integral
};
PushoutResult pushout_int(const MonoidHom& f, const MonoidHom& g);

std::vector<Int> prime_factors(Int n);

}  // namespace fanlib
