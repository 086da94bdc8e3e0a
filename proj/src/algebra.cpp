#include "fmmkit/algebra.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fmmkit {

namespace {

FieldMode combined_mode(const FmmTensor& a, const FmmTensor& b) {
  return a.field_mode() == FieldMode::laurent || b.field_mode() == FieldMode::laurent ? FieldMode::laurent
                                                                                        : FieldMode::rational;
}

LaurentMatrix place(const LaurentMatrix& block, std::size_t rows, std::size_t cols, std::size_t row_offset,
                    std::size_t col_offset) {
  LaurentMatrix out(rows, cols);
  for (std::size_t i = 0; i < block.rows(); ++i)
    for (std::size_t j = 0; j < block.cols(); ++j) out(i + row_offset, j + col_offset) = block(i, j);
  return out;
}

FmmTensor direct_sum_m(const FmmTensor& t1, const FmmTensor& t2) {
  const Dims& a = t1.dims();
  const Dims& b = t2.dims();
  if (a.n != b.n || a.p != b.p)
    throw ShapeError("direct sum along M needs equal n and p, got " + a.to_string() + " and " + b.to_string());
  const Dims d{a.m + b.m, a.n, a.p};
  std::vector<RankOneTerm> terms;
  terms.reserve(t1.rank() + t2.rank());
  for (const auto& t : t1.terms())
    terms.push_back({place(t.P, d.m, d.n, 0, 0), t.Q, place(t.S, d.p, d.m, 0, 0)});
  for (const auto& t : t2.terms())
    terms.push_back({place(t.P, d.m, d.n, a.m, 0), t.Q, place(t.S, d.p, d.m, 0, a.m)});
  return {d, combined_mode(t1, t2), std::move(terms)};
}

void require_unmasked(const FmmTensor& t, const char* op) {
  if (t.support()) throw ContractError(std::string(op) + " does not accept a masked (partial) tensor");
}

}  // namespace

FmmTensor direct_sum(const FmmTensor& t1, const FmmTensor& t2, Axis axis) {
  require_unmasked(t1, "direct_sum");
  require_unmasked(t2, "direct_sum");
  switch (axis) {
    case Axis::M:
      return direct_sum_m(t1, t2);
    case Axis::N:
      // ⟨m,n,p⟩ → ⟨n,p,m⟩ puts n first.
      return symmetry_apply(direct_sum_m(symmetry_apply(t1, 1, false), symmetry_apply(t2, 1, false)), 2, false);
    case Axis::P:
      return symmetry_apply(direct_sum_m(symmetry_apply(t1, 2, false), symmetry_apply(t2, 2, false)), 1, false);
  }
  throw ContractError("unknown axis");
}

FmmTensor kronecker(const FmmTensor& t1, const FmmTensor& t2) {
  require_unmasked(t1, "kronecker");
  require_unmasked(t2, "kronecker");
  const Dims& a = t1.dims();
  const Dims& b = t2.dims();
  std::vector<RankOneTerm> terms;
  terms.reserve(t1.rank() * t2.rank());
  for (const auto& x : t1.terms())
    for (const auto& y : t2.terms()) terms.push_back({kron(x.P, y.P), kron(x.Q, y.Q), kron(x.S, y.S)});
  return {{a.m * b.m, a.n * b.n, a.p * b.p}, combined_mode(t1, t2), std::move(terms)};
}

FmmTensor symmetry_apply(const FmmTensor& t, int rotation, bool transpose) {
  rotation = ((rotation % 3) + 3) % 3;
  if (rotation == 0 && !transpose) return t;
  require_unmasked(t, "a nontrivial symmetry");
  Dims d = t.dims();
  std::vector<RankOneTerm> terms = t.terms();
  for (int r = 0; r < rotation; ++r) {
    for (auto& term : terms) term = {std::move(term.Q), std::move(term.S), std::move(term.P)};
    d = {d.n, d.p, d.m};
  }
  if (transpose) {
    for (auto& term : terms) term = {term.S.transpose(), term.Q.transpose(), term.P.transpose()};
    d = {d.m, d.p, d.n};
  }
  return {d, t.field_mode(), std::move(terms)};
}

FmmTensor isotropy_apply(const FmmTensor& t, const IsotropyElement& g) {
  const Dims& d = t.dims();
  auto check = [](const RationalMatrix& x, std::size_t n, const char* name) {
    if (x.rows() != n || x.cols() != n)
      throw ShapeError(std::string("isotropy ") + name + " must be " + std::to_string(n) + "x" + std::to_string(n));
    if (matrix_rank(x) != n) throw ContractError(std::string("isotropy ") + name + " is singular");
  };
  check(g.U, d.m, "U");
  check(g.V, d.n, "V");
  check(g.W, d.p, "W");
  if (t.support() && !(g.U == RationalMatrix::identity(d.m) && g.V == RationalMatrix::identity(d.n)))
    throw ContractError("isotropy on a masked tensor must fix the A slot");
  const LaurentMatrix Uinv_t = to_laurent(inverse(g.U).transpose());
  const LaurentMatrix Vinv_t = to_laurent(inverse(g.V).transpose());
  const LaurentMatrix Winv_t = to_laurent(inverse(g.W).transpose());
  const LaurentMatrix Ut = to_laurent(g.U.transpose());
  const LaurentMatrix Vt = to_laurent(g.V.transpose());
  const LaurentMatrix Wt = to_laurent(g.W.transpose());
  std::vector<RankOneTerm> terms;
  terms.reserve(t.rank());
  for (const auto& term : t.terms())
    terms.push_back({Uinv_t * term.P * Vt, Vinv_t * term.Q * Wt, Winv_t * term.S * Ut});
  return {d, t.field_mode(), std::move(terms), t.support()};
}

namespace {

const LaurentMatrix& factor(const RankOneTerm& t, Slot s) {
  switch (s) {
    case Slot::P:
      return t.P;
    case Slot::Q:
      return t.Q;
    case Slot::S:
      return t.S;
  }
  return t.P;
}

LaurentMatrix& factor(RankOneTerm& t, Slot s) {
  return const_cast<LaurentMatrix&>(factor(static_cast<const RankOneTerm&>(t), s));
}

// Divides by the leading monomial of the first nonzero entry; equal normal forms
// ⇔ equal up to a unit of ℚ[e, 1/e].
LaurentMatrix unit_normal_form(const LaurentMatrix& f) {
  for (const auto& v : f.data())
    if (!v.is_zero()) {
      const LaurentScalar lead = v.leading_monomial();
      return f.map([&](const LaurentScalar& x) { return x.divided_by_monomial(lead); });
    }
  return f;
}

}  // namespace

std::vector<SerendipityGroup> serendipity_find(const FmmTensor& t, SerendipityOptions options) {
  std::vector<SerendipityGroup> out;
  for (Slot slot : {Slot::P, Slot::Q, Slot::S}) {
    std::map<std::string, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < t.rank(); ++i) {
      const LaurentMatrix& f = factor(t.term(i), slot);
      buckets[to_string(options.up_to_scalar ? unit_normal_form(f) : f)].push_back(i);
    }
    std::vector<SerendipityGroup> groups;
    for (auto& [key, idx] : buckets)
      if (idx.size() >= 2) groups.push_back({slot, factor(t.term(idx.front()), slot), std::move(idx)});
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.term_indices.front() < b.term_indices.front(); });
    for (auto& g : groups) out.push_back(std::move(g));
  }
  return out;
}

FmmTensor serendipity_transform(const FmmTensor& t, const SerendipityGroup& group, const RationalMatrix& M) {
  const std::size_t q = group.term_indices.size();
  if (q < 2) throw ContractError("serendipity group needs at least two terms");
  if (M.rows() != q || M.cols() != q)
    throw ShapeError("serendipity matrix must be " + std::to_string(q) + "x" + std::to_string(q));
  if (matrix_rank(M) != q) throw ContractError("serendipity matrix is singular");
  for (std::size_t idx : group.term_indices) {
    if (idx >= t.rank()) throw ContractError("stale serendipity group: term index out of range");
    if (!(factor(t.term(idx), group.slot) == group.shared_factor))
      throw ContractError("stale serendipity group: term " + std::to_string(idx + 1) + " no longer shares the factor");
  }
  const Slot u_slot = group.slot == Slot::P ? Slot::Q : Slot::P;
  const Slot v_slot = group.slot == Slot::S ? Slot::Q : Slot::S;
  const RationalMatrix Minv = inverse(M);

  std::vector<RankOneTerm> terms = t.terms();
  for (std::size_t i = 0; i < q; ++i) {
    const LaurentMatrix& u0 = factor(t.term(group.term_indices[0]), u_slot);
    const LaurentMatrix& v0 = factor(t.term(group.term_indices[0]), v_slot);
    LaurentMatrix alpha(u0.rows(), u0.cols()), beta(v0.rows(), v0.cols());
    for (std::size_t a = 0; a < q; ++a) {
      const RankOneTerm& src = t.term(group.term_indices[a]);
      if (!M(a, i).is_zero()) alpha += factor(src, u_slot) * LaurentScalar(M(a, i));
      if (!Minv(i, a).is_zero()) beta += factor(src, v_slot) * LaurentScalar(Minv(i, a));
    }
    RankOneTerm& dst = terms[group.term_indices[i]];
    factor(dst, u_slot) = std::move(alpha);
    factor(dst, v_slot) = std::move(beta);
  }
  return {t.dims(), t.field_mode(), std::move(terms), t.support()};
}

namespace {

void check_injection(const std::vector<std::size_t>& map, std::size_t range, const char* name) {
  if (map.empty()) throw ContractError(std::string("embedding ") + name + " is empty");
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] >= range) throw ContractError(std::string("embedding ") + name + " index out of range");
    if (i && map[i] <= map[i - 1]) throw ContractError(std::string("embedding ") + name + " must be strictly increasing");
  }
}

}  // namespace

FmmTensor embed_and_add(const FmmTensor& partial, const FmmTensor& block, const BlockEmbedding& e) {
  if (!partial.support()) throw ContractError("embed_and_add needs a partial tensor with a support mask");
  if (block.support()) throw ContractError("embedded block must be unmasked");
  const Dims& d = partial.dims();
  const Dims& b = block.dims();
  check_injection(e.a_rows, d.m, "a_rows");
  check_injection(e.a_cols, d.n, "a_cols");
  check_injection(e.b_cols, d.p, "b_cols");
  if (b.m != e.a_rows.size() || b.n != e.a_cols.size() || b.p != e.b_cols.size())
    throw ShapeError("block dimensions " + b.to_string() + " do not match the embedding");

  const SupportMask& mask = *partial.support();
  const std::set<std::size_t> rows(e.a_rows.begin(), e.a_rows.end()), cols(e.a_cols.begin(), e.a_cols.end());
  for (std::size_t i = 0; i < d.m; ++i)
    for (std::size_t j = 0; j < d.n; ++j) {
      const bool covered = rows.count(i) && cols.count(j);
      if (covered == mask.allowed(i, j))
        throw ContractError("embedding does not cover exactly the complement of the support mask (entry " +
                            std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    }

  std::vector<RankOneTerm> terms = partial.terms();
  terms.reserve(partial.rank() + block.rank());
  for (const auto& t : block.terms()) {
    RankOneTerm big{LaurentMatrix(d.m, d.n), LaurentMatrix(d.n, d.p), LaurentMatrix(d.p, d.m)};
    for (std::size_t i = 0; i < b.m; ++i)
      for (std::size_t j = 0; j < b.n; ++j) big.P(e.a_rows[i], e.a_cols[j]) = t.P(i, j);
    for (std::size_t j = 0; j < b.n; ++j)
      for (std::size_t k = 0; k < b.p; ++k) big.Q(e.a_cols[j], e.b_cols[k]) = t.Q(j, k);
    for (std::size_t k = 0; k < b.p; ++k)
      for (std::size_t i = 0; i < b.m; ++i) big.S(e.b_cols[k], e.a_rows[i]) = t.S(k, i);
    terms.push_back(std::move(big));
  }
  return {d, combined_mode(partial, block), std::move(terms)};
}

std::size_t hopcroft_rank_bound(std::size_t m, std::size_t n) { return (3 * m * n + std::max(m, n) + 1) / 2; }

}  // namespace fmmkit
