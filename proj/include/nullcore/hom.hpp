#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nullcore/model.hpp"

namespace nullcore {

// A homomorphism is represented by its mapping. Constants are left out and
// map to themselves.
using Homomorphism = TermMap;

struct HomOptions {
  bool injective = false;
  // Source nulls and variables may only be sent to nulls.
  bool nulls_to_nulls = false;
};

// Return false to stop the enumeration.
using HomVisitor = std::function<bool(const Homomorphism&)>;

/// Visits every h extending `fixed` with h(source) ⊆ target and
/// h(forbidden) ∩ target = ∅. Variables and nulls of `source` that `fixed`
/// leaves open are search variables. Returns true if the visitor stopped.
/// Throws PreconditionViolated if a forbidden atom has a term the search
/// never binds.
bool for_each_hom(const std::vector<Atom>& source, const Interpretation& target, const TermMap& fixed,
                  const std::vector<Atom>& forbidden, const HomVisitor& visit, HomOptions options = {});

std::optional<Homomorphism> find_match(const std::vector<Atom>& source, const Interpretation& target,
                                       const TermMap& fixed = {}, const std::vector<Atom>& forbidden = {},
                                       HomOptions options = {});

std::vector<Homomorphism> enumerate_homs(const std::vector<Atom>& source, const Interpretation& target,
                                         const TermMap& fixed = {}, const std::vector<Atom>& forbidden = {});

// Homomorphism between interpretations; nulls of `from` are the variables.
std::optional<Homomorphism> find_hom(const Interpretation& from, const Interpretation& to, HomOptions options = {});
bool hom_equivalent(const Interpretation& a, const Interpretation& b);

enum class HomClass { NotAHomomorphism, Plain, Strong, Embedding, Isomorphism };

std::string_view to_string(HomClass c);

/// Strongest class h achieves as a map from `source` to `target`.
HomClass classify_hom(const Homomorphism& h, const Interpretation& source, const Interpretation& target);

struct CoreResult {
  Interpretation core;
  // Retraction of the input onto `core`.
  Homomorphism retraction;
};

/// Core by iterated proper retraction. Each round looks for a null n and a
/// homomorphism that moves n's block into the instance without n while
/// keeping all other terms fixed.
CoreResult compute_core(const Interpretation& instance);
Interpretation core_of(const Interpretation& instance);
bool is_core(const Interpretation& instance);

/// Homomorphism C → U, checked to be an embedding. Throws NoHomomorphism
/// when no homomorphism exists or the one found is not an embedding.
Homomorphism find_core_embedding(const Interpretation& core, const Interpretation& universal);

bool is_isomorphic(const Interpretation& a, const Interpretation& b);

}  // namespace nullcore
