#include "ragmt/prompt.hpp"

#include <nlohmann/json.hpp>

#include "ragmt/text.hpp"

namespace ragmt::prompt {

using nlohmann::json;

namespace {

std::string join_blocks(const std::vector<std::string>& blocks) {
  std::string out;
  for (const auto& b : blocks) {
    if (!out.empty()) out += "\n\n";
    out += b;
  }
  return out;
}

std::string examples_header(const LanguageProfile& p) {
  return "To help with the translation, here are some example parallel sentences between " +
         p.target_name + " and " + p.source_name + ":";
}

std::string glossary_header(const LanguageProfile& p) {
  return "To help with the translation, here is a word list between " + p.source_name + " and " +
         p.target_name + " in the format: " + p.source_name + " word (pos tag) -> " +
         p.target_name + " word:";
}

std::vector<std::string> context_blocks(const ContextBundle& bundle, const LanguageProfile& p) {
  std::vector<std::string> blocks;
  if (!bundle.examples.empty()) blocks.push_back(examples_block(bundle.examples, p));
  if (!bundle.lexicon.empty()) blocks.push_back(glossary_block(bundle.lexicon, p));
  return blocks;
}

std::string source_line(std::string_view source, const LanguageProfile& p) {
  return "Source text (" + p.source_name + "): " + std::string(source);
}

std::string draft_line(std::string_view draft, const LanguageProfile& p) {
  return "Machine translation (" + p.target_name + "): " + std::string(draft);
}

std::string direct_instruction(const LanguageProfile& p) {
  return "Translate the above text from " + p.source_name + " to " + p.target_name + ":";
}

constexpr std::string_view kPostEditInstruction = "Correct the machine translation if necessary:";

}  // namespace

LanguageProfile LanguageProfile::from_json(const json& j) {
  LanguageProfile p;
  p.target_name = j.value("target_name", p.target_name);
  p.source_name = j.value("source_name", p.source_name);
  p.description = j.value("description", p.description);
  return p;
}

json LanguageProfile::to_json() const {
  return json{{"target_name", target_name}, {"source_name", source_name}, {"description", description}};
}

std::string_view to_string(Mode m) { return m == Mode::Direct ? "direct" : "postedit"; }

Mode parse_mode(std::string_view s) {
  const auto l = text::lowercase(s);
  if (l == "direct") return Mode::Direct;
  if (l == "postedit" || l == "post-edit" || l == "post_edit") return Mode::PostEdit;
  throw PromptError("unknown prompt mode '" + std::string(s) + "'");
}

std::string system_message(Mode mode, const LanguageProfile& p) {
  const auto& t = p.target_name;
  const auto& s = p.source_name;
  std::string msg = p.description + "\n\n";
  if (mode == Mode::Direct) {
    msg += "You are an expert Bible translator in " + t +
           " language. Your job is to translate bible verses from " + s + " to " + t +
           " language, providing accurate and faithful translations that maintain the meaning and "
           "context of the source text. When provided with glossary entries or example "
           "translations, use them as reference to help ensure correct translation. You must "
           "respond ONLY with your translation in " + t +
           " - no explanations, no reasoning, no additional text.";
  } else {
    msg += "You are an expert Bible translator in " + t +
           " language. Your job is to correct and verify machine generated bible verses in " + t +
           " language which is translated from the " + s +
           " language. Only make changes when necessary, ensuring that the post-edited " +
           text::lowercase(t) + " verse is aligned with the source " + s +
           " verse. When provided with glossary entries or example translations, use them as "
           "reference to help ensure correct translation. You must respond ONLY with the "
           "corrected translation text - no explanations, no reasoning, no additional text.";
  }
  return msg;
}

std::string examples_block(const std::vector<retrieval::RetrievedExample>& examples,
                           const LanguageProfile& p) {
  std::vector<std::string> parts{examples_header(p)};
  for (const auto& ex : examples) {
    parts.push_back(p.target_name + ": " + ex.pair.target_text + "\n" + p.source_name +
                    " translation: " + ex.pair.source_text);
  }
  return join_blocks(parts);
}

std::string glossary_line(const LexiconEntry& e) {
  std::string line = "- " + e.source_word;
  if (e.pos && !e.pos->empty()) line += " (" + *e.pos + ")";
  return line + " -> " + e.target_word;
}

std::string glossary_block(const std::vector<retrieval::RetrievedLexicon>& lexicon,
                           const LanguageProfile& p) {
  std::string out = glossary_header(p);
  for (const auto& l : lexicon) out += "\n" + glossary_line(l.entry);
  return out;
}

RenderedPrompt render_direct(std::string_view source, const ContextBundle& bundle,
                             const LanguageProfile& p) {
  if (text::trim(source).empty()) throw PromptError("source text is empty");
  auto blocks = context_blocks(bundle, p);
  blocks.push_back(source_line(source, p));
  blocks.push_back(direct_instruction(p));
  return {system_message(Mode::Direct, p), join_blocks(blocks), Mode::Direct};
}

RenderedPrompt render_postedit(std::string_view source, std::string_view draft,
                               const ContextBundle& bundle, const LanguageProfile& p) {
  if (text::trim(source).empty()) throw PromptError("source text is empty");
  if (text::trim(draft).empty()) {
    throw PromptError("post-editing requires a non-empty draft; use direct mode instead");
  }
  auto blocks = context_blocks(bundle, p);
  blocks.push_back(source_line(source, p));
  blocks.push_back(draft_line(draft, p));
  blocks.push_back(std::string(kPostEditInstruction));
  return {system_message(Mode::PostEdit, p), join_blocks(blocks), Mode::PostEdit};
}

ParsedPrompt parse_user(std::string_view user, const LanguageProfile& p) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (true) {
    const auto nl = user.find('\n', start);
    lines.push_back(user.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  std::size_t i = 0;
  auto fail = [&](const std::string& what) -> void {
    throw PromptError("prompt parse error at line " + std::to_string(i + 1) + ": " + what);
  };
  auto expect_blank = [&] {
    if (i >= lines.size() || !lines[i].empty()) fail("expected a blank line");
    ++i;
  };
  auto take_prefixed = [&](const std::string& prefix) -> std::string {
    if (i >= lines.size() || !lines[i].starts_with(prefix)) fail("expected '" + prefix + "'");
    return std::string(lines[i++].substr(prefix.size()));
  };

  ParsedPrompt out;
  const auto target_prefix = p.target_name + ": ";
  const auto source_tr_prefix = p.source_name + " translation: ";
  if (i < lines.size() && lines[i] == examples_header(p)) {
    ++i;
    while (i + 2 < lines.size() && lines[i].empty() && lines[i + 1].starts_with(target_prefix)) {
      ++i;
      auto tgt = take_prefixed(target_prefix);
      auto src = take_prefixed(source_tr_prefix);
      out.examples.emplace_back(std::move(tgt), std::move(src));
    }
    if (out.examples.empty()) fail("example block without examples");
    expect_blank();
  }
  if (i < lines.size() && lines[i] == glossary_header(p)) {
    ++i;
    while (i < lines.size() && lines[i].starts_with("- ")) out.glossary.emplace_back(lines[i++]);
    if (out.glossary.empty()) fail("glossary block without entries");
    expect_blank();
  }
  out.source = take_prefixed("Source text (" + p.source_name + "): ");
  expect_blank();
  if (i < lines.size() && lines[i].starts_with("Machine translation (" + p.target_name + "): ")) {
    out.mode = Mode::PostEdit;
    out.draft = take_prefixed("Machine translation (" + p.target_name + "): ");
    expect_blank();
    if (i >= lines.size() || lines[i] != kPostEditInstruction) fail("expected post-edit instruction");
  } else {
    out.mode = Mode::Direct;
    if (i >= lines.size() || lines[i] != direct_instruction(p)) fail("expected translate instruction");
  }
  if (++i != lines.size()) fail("trailing text after instruction");
  return out;
}

}  // namespace ragmt::prompt
