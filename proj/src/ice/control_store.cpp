#include "ice/control_store.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace ice {

SelectionStrategy SelectionStrategy::from_config(const std::string& mode,
                                                 const std::string& fixed_id) {
    if (mode == "fixed") {
        if (fixed_id.empty()) {
            raise(ErrorCode::InvalidArgument, "fixed selection needs a sentence id");
        }
        return fixed(fixed_id);
    }
    if (mode == "round_robin") return round_robin();
    if (mode == "lexical_match") return lexical_match();
    raise(ErrorCode::InvalidArgument, "unknown selection strategy '" + mode + "'");
}

std::string SelectionStrategy::mode_name() const {
    switch (mode) {
        case Mode::Fixed: return "fixed";
        case Mode::RoundRobin: return "round_robin";
        case Mode::LexicalMatch: return "lexical_match";
    }
    return "?";
}

namespace {

std::string ascii_lower(std::string_view word) {
    std::string out(word);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::set<std::string> lower_token_set(std::string_view text) {
    std::set<std::string> tokens;
    for (const std::string& word : whitespace_words(text)) {
        tokens.insert(ascii_lower(word));
    }
    return tokens;
}

}  // namespace

double overlap_score(std::string_view a, std::string_view b) {
    std::set<std::string> ta = lower_token_set(a);
    std::set<std::string> tb = lower_token_set(b);
    std::size_t intersection = 0;
    for (const std::string& tok : ta) {
        if (tb.count(tok)) ++intersection;
    }
    std::size_t union_size = ta.size() + tb.size() - intersection;
    return static_cast<double>(intersection) /
           static_cast<double>(std::max<std::size_t>(1, union_size));
}

ControlStore ControlStore::from_json(const nlohmann::json& array, const TokenCounter& counter) {
    if (!array.is_array()) {
        raise(ErrorCode::ParseError, "control store must be a JSON array of sentences");
    }
    ControlStore store;
    for (std::size_t i = 0; i < array.size(); ++i) {
        const nlohmann::json& entry = array[i];
        if (!entry.is_object() || !entry.contains("id") || !entry.contains("text")) {
            raise(ErrorCode::ParseError,
                  "control sentence #" + std::to_string(i) + " needs id and text");
        }
        ControlSentence s;
        try {
            s.id = entry["id"].get<std::string>();
            s.text = entry["text"].get<std::string>();
            s.priority = entry.value("priority", 0);
            if (entry.contains("tags")) {
                s.tags = entry["tags"].get<std::vector<std::string>>();
            }
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::ParseError,
                  "control sentence #" + std::to_string(i) + ": " + e.what());
        }
        if (s.id.empty()) {
            raise(ErrorCode::ParseError, "control sentence #" + std::to_string(i) + ": empty id");
        }
        s.token_count = counter.count(s.text);
        store.sentences_.push_back(std::move(s));
    }
    std::sort(store.sentences_.begin(), store.sentences_.end(),
              [](const ControlSentence& a, const ControlSentence& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < store.sentences_.size(); ++i) {
        if (store.sentences_[i].id == store.sentences_[i - 1].id) {
            raise(ErrorCode::ParseError,
                  "duplicate control sentence id '" + store.sentences_[i].id + "'");
        }
    }
    return store;
}

ControlStore ControlStore::load_file(const std::string& path, const TokenCounter& counter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open control store file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    nlohmann::json parsed = nlohmann::json::parse(buffer.str(), nullptr, false);
    if (parsed.is_discarded()) {
        raise(ErrorCode::ParseError, "control store file '" + path + "' is not valid JSON");
    }
    return from_json(parsed, counter);
}

const ControlSentence* ControlStore::find(std::string_view id) const {
    auto it = std::lower_bound(
        sentences_.begin(), sentences_.end(), id,
        [](const ControlSentence& s, std::string_view key) { return s.id < key; });
    if (it == sentences_.end() || it->id != id) return nullptr;
    return &*it;
}

const ControlSentence& ControlStore::select(const SelectionStrategy& strategy,
                                            std::string_view context_tail,
                                            std::uint64_t injection_index) const {
    if (sentences_.empty()) {
        raise(ErrorCode::EmptyStore, "control store has no sentences to select from");
    }
    switch (strategy.mode) {
        case SelectionStrategy::Mode::Fixed: {
            const ControlSentence* s = find(strategy.fixed_id);
            if (s == nullptr) {
                raise(ErrorCode::UnknownId,
                      "control sentence '" + strategy.fixed_id + "' is not in the store");
            }
            return *s;
        }
        case SelectionStrategy::Mode::RoundRobin:
            return sentences_[injection_index % sentences_.size()];
        case SelectionStrategy::Mode::LexicalMatch: {
            const ControlSentence* best = &sentences_.front();
            double best_score = overlap_score(best->text, context_tail);
            for (std::size_t i = 1; i < sentences_.size(); ++i) {
                const ControlSentence& s = sentences_[i];
                double score = overlap_score(s.text, context_tail);
                // Ties: higher priority wins, then the sentences_ id order
                // (ascending) already reached `best` first.
                if (score > best_score ||
                    (score == best_score && s.priority > best->priority)) {
                    best = &s;
                    best_score = score;
                }
            }
            return *best;
        }
    }
    raise(ErrorCode::Internal, "unreachable selection mode");
}

}  // namespace ice
