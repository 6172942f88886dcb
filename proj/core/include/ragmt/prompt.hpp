#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ragmt/retrieval.hpp"

namespace ragmt::prompt {

class PromptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Language names and the descriptive paragraph that opens both system
/// messages. The default reproduces the Dhao setup.
struct LanguageProfile {
  std::string target_name = "Dhao";
  std::string source_name = "English";
  std::string description =
      "Dhao is a member of the Sumba-Flores branch of the Malayo-Polynesian language family. It "
      "is spoken in Ndao Island in the Lesser Sunda Islands in Indonesia by about 5,000 people. "
      "It is classified as a member of the Sumba branch of Malayo-Polynesian languages, but may "
      "be a Papuan language. It is also known as Ndao, Ndaonese or Ndaundau.";

  static LanguageProfile from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

enum class Mode { Direct, PostEdit };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

struct ContextBundle {
  std::vector<retrieval::RetrievedExample> examples;
  std::vector<retrieval::RetrievedLexicon> lexicon;
};

struct RenderedPrompt {
  std::string system;
  std::string user;
  Mode mode = Mode::Direct;

  std::size_t total_bytes() const { return system.size() + user.size(); }
  bool operator==(const RenderedPrompt&) const = default;
};

std::string system_message(Mode mode, const LanguageProfile& profile = {});

RenderedPrompt render_direct(std::string_view source, const ContextBundle& bundle,
                             const LanguageProfile& profile = {});
RenderedPrompt render_postedit(std::string_view source, std::string_view draft,
                               const ContextBundle& bundle, const LanguageProfile& profile = {});

// Individual blocks, exposed for length accounting.
std::string examples_block(const std::vector<retrieval::RetrievedExample>& examples,
                           const LanguageProfile& profile = {});
std::string glossary_block(const std::vector<retrieval::RetrievedLexicon>& lexicon,
                           const LanguageProfile& profile = {});
std::string glossary_line(const LexiconEntry& entry);

struct ParsedPrompt {
  Mode mode = Mode::Direct;
  std::string source;
  std::optional<std::string> draft;
  std::vector<std::pair<std::string, std::string>> examples;  // (target, source)
  std::vector<std::string> glossary;
};

/// Inverse of the renderers for the user message. Throws PromptError when the
/// text does not follow the template grammar.
ParsedPrompt parse_user(std::string_view user, const LanguageProfile& profile = {});

}  // namespace ragmt::prompt
