#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ice/error.hpp"
#include "ice/tokenizer.hpp"

namespace ice {

// One operator-authored control sentence from the bank.
struct ControlSentence {
    std::string id;
    std::string text;
    std::uint64_t token_count = 0;
    std::vector<std::string> tags;
    int priority = 0;
};

// How the next control sentence is picked at injection time.
struct SelectionStrategy {
    enum class Mode { Fixed, RoundRobin, LexicalMatch };

    Mode mode = Mode::RoundRobin;
    std::string fixed_id;  // only for Mode::Fixed

    static SelectionStrategy fixed(std::string id) {
        return {Mode::Fixed, std::move(id)};
    }
    static SelectionStrategy round_robin() { return {Mode::RoundRobin, {}}; }
    static SelectionStrategy lexical_match() { return {Mode::LexicalMatch, {}}; }

    static SelectionStrategy from_config(const std::string& mode, const std::string& fixed_id);
    std::string mode_name() const;
};

// Jaccard similarity over lowercased whitespace tokens:
// |intersection| / max(1, |union|).
double overlap_score(std::string_view a, std::string_view b);

// Immutable, id-sorted bank of control sentences. Token counts are computed
// at load time with the active counter.
class ControlStore {
public:
    // Parses a JSON array of {id, text, tags?, priority?}. Duplicate or empty
    // ids are a ParseError.
    static ControlStore from_json(const nlohmann::json& array, const TokenCounter& counter);
    static ControlStore load_file(const std::string& path, const TokenCounter& counter);

    std::size_t size() const { return sentences_.size(); }
    bool empty() const { return sentences_.empty(); }
    const std::vector<ControlSentence>& sentences() const { return sentences_; }

    const ControlSentence* find(std::string_view id) const;

    // Deterministic pick for the injection_index-th injection:
    //   fixed         -> the configured sentence (UnknownId if absent)
    //   round-robin   -> position injection_index mod size in id order
    //   lexical-match -> highest overlap with context_tail; ties prefer
    //                    higher priority, then the smaller id
    // An empty store raises EmptyStore.
    const ControlSentence& select(const SelectionStrategy& strategy,
                                  std::string_view context_tail,
                                  std::uint64_t injection_index) const;

private:
    std::vector<ControlSentence> sentences_;  // sorted by id
};

// Thread-safe holder for the live store snapshot; reload swaps atomically
// while in-flight requests keep the snapshot they started with.
class ControlStoreHandle {
public:
    explicit ControlStoreHandle(ControlStore store)
        : snapshot_(std::make_shared<const ControlStore>(std::move(store))) {}

    std::shared_ptr<const ControlStore> snapshot() const {
        std::lock_guard<std::mutex> lock(mu_);
        return snapshot_;
    }

    std::size_t replace(ControlStore store) {
        auto next = std::make_shared<const ControlStore>(std::move(store));
        std::lock_guard<std::mutex> lock(mu_);
        snapshot_ = std::move(next);
        return snapshot_->size();
    }

private:
    mutable std::mutex mu_;
    std::shared_ptr<const ControlStore> snapshot_;
};

}  // namespace ice
