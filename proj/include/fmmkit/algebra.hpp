#pragma once

#include <cstddef>
#include <vector>

#include "fmmkit/tensor.hpp"

namespace fmmkit {

enum class Axis { M, N, P };

/// Stacks two schemes along one axis: ⟨ℓ,n,p;r⟩ ⊕ ⟨m−ℓ,n,p;s⟩ = ⟨m,n,p;r+s⟩ for Axis::M.
/// The other axes go through the cyclic symmetry so that only the M split is implemented.
FmmTensor direct_sum(const FmmTensor& t1, const FmmTensor& t2, Axis axis);

/// ⟨m,n,p;r⟩ ⊗ ⟨u,v,w;s⟩ = ⟨mu,nv,pw;rs⟩. Term (i, j) is Kron(P_i, P'_j) ⊗ Kron(Q_i, Q'_j) ⊗ Kron(S_i, S'_j),
/// so row a of the big A is (outer row)·u + (inner row); t1 is the outer level.
FmmTensor kronecker(const FmmTensor& t1, const FmmTensor& t2);

/// `rotation` cyclic shifts (P,Q,S) → (Q,S,P) on ⟨m,n,p⟩ → ⟨n,p,m⟩, then, if `transpose`,
/// (P,Q,S) → (Sᵀ,Qᵀ,Pᵀ) on ⟨m,n,p⟩ → ⟨m,p,n⟩.
FmmTensor symmetry_apply(const FmmTensor& t, int rotation, bool transpose);

/// Sandwich action of (U, V, W) ∈ GL(m)×GL(n)×GL(p).
struct IsotropyElement {
  RationalMatrix U, V, W;
};

/// Returns t' with contract(t', U·A·V⁻¹, V·B·W⁻¹, W·C·U⁻¹) = contract(t, A, B, C):
/// P' = U⁻ᵀ P Vᵀ,  Q' = V⁻ᵀ Q Wᵀ,  S' = W⁻ᵀ S Uᵀ.
FmmTensor isotropy_apply(const FmmTensor& t, const IsotropyElement& g);

enum class Slot { P = 0, Q = 1, S = 2 };

struct SerendipityGroup {
  Slot slot;
  LaurentMatrix shared_factor;
  std::vector<std::size_t> term_indices;  ///< 0-based, increasing
};

struct SerendipityOptions {
  /// Group factors equal up to a unit c·e^k instead of entrywise equal.
  bool up_to_scalar = false;
};

/// Maximal groups of ≥ 2 terms sharing one factor, ordered by slot then first term index.
std::vector<SerendipityGroup> serendipity_find(const FmmTensor& t, SerendipityOptions options = {});

/// Recombines the terms of `group` over the two non-shared slots U (first in P,Q,S order)
/// and V: α = Mᵀ·[U], β = M⁻¹·[V]. The expanded tensor is unchanged.
FmmTensor serendipity_transform(const FmmTensor& t, const SerendipityGroup& group, const RationalMatrix& M);

/// 0-based, strictly increasing index maps of a block into the big product.
struct BlockEmbedding {
  std::vector<std::size_t> a_rows;  ///< block rows of A into {0..m-1}
  std::vector<std::size_t> a_cols;  ///< block cols of A (and rows of B) into {0..n-1}
  std::vector<std::size_t> b_cols;  ///< block cols of B into {0..p-1}
};

/// Completes a partial scheme: adds `block`'s terms scattered through `e` into the
/// masked-out region of `partial`. The A-block rows×cols must be exactly the
/// complement of partial's support.
FmmTensor embed_and_add(const FmmTensor& partial, const FmmTensor& block, const BlockEmbedding& e);

/// ⌈(3mn + max(m,n)) / 2⌉ multiplications for ⟨m,2,n⟩.
std::size_t hopcroft_rank_bound(std::size_t m, std::size_t n);

}  // namespace fmmkit
