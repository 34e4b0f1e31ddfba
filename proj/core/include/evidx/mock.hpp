#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evidx/corpus.hpp"
#include "evidx/gateway.hpp"
#include "evidx/schema.hpp"

namespace evidx {

/// Decides judge prompts in the mock backend: (value A, value B, slot).
using EquivalenceRule = std::function<bool(std::string_view, std::string_view, std::string_view)>;

/// Symmetric lookup over normalized spellings; anything else is "no".
EquivalenceRule synonym_rule(std::vector<std::pair<std::string, std::string>> synonyms);

/// Optional rewrite of echoed tuples, for planting errors in tests. Receives
/// the registry query, the document (per-paper) or nullopt (global), and the
/// tuples about to be serialized.
using EchoTransform =
    std::function<std::vector<StudyTuple>(const QuerySpec&, std::optional<DocId>, std::vector<StudyTuple>)>;

struct EchoOptions {
  EquivalenceRule judge;    // empty: every judge prompt answers "no"
  EchoTransform transform;  // empty: echo gold unchanged
};

/// Mock backend that answers extraction prompts with the gold projection of
/// the documents in the prompt, corpus-level prompts with the oracle value,
/// and aggregation prompts by computing the statistic from the per-document
/// outputs it is given. Unrecognized prompts raise BackendError.
MockResponder make_gold_echo_responder(std::vector<std::shared_ptr<const Corpus>> corpora, EchoOptions options = {});

/// Answer to an aggregation prompt computed from its per-document N outputs.
std::string aggregation_echo(std::string_view prompt);

}  // namespace evidx
