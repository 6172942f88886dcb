"""Writes the golden prompt files from the prompt template text.

Independent of the C++ renderer; rerun only when the templates change.
"""
import json

DESCRIPTION = (
    "Dhao is a member of the Sumba-Flores branch of the Malayo-Polynesian language family. "
    "It is spoken in Ndao Island in the Lesser Sunda Islands in Indonesia by about 5,000 people. "
    "It is classified as a member of the Sumba branch of Malayo-Polynesian languages, but may be "
    "a Papuan language. It is also known as Ndao, Ndaonese or Ndaundau."
)

SYSTEM = {
    "direct": DESCRIPTION + "\n\n"
    "You are an expert Bible translator in Dhao language. Your job is to translate bible verses "
    "from English to Dhao language, providing accurate and faithful translations that maintain "
    "the meaning and context of the source text. When provided with glossary entries or example "
    "translations, use them as reference to help ensure correct translation. You must respond "
    "ONLY with your translation in Dhao - no explanations, no reasoning, no additional text.",
    "postedit": DESCRIPTION + "\n\n"
    "You are an expert Bible translator in Dhao language. Your job is to correct and verify "
    "machine generated bible verses in Dhao language which is translated from the English "
    "language. Only make changes when necessary, ensuring that the post-edited dhao verse is "
    "aligned with the source English verse. When provided with glossary entries or example "
    "translations, use them as reference to help ensure correct translation. You must respond "
    "ONLY with the corrected translation text - no explanations, no reasoning, no additional text.",
}

inputs = json.load(open("inputs.json", encoding="utf-8"))


def examples_block(examples):
    head = "To help with the translation, here are some example parallel sentences between Dhao and English:"
    pairs = ["Dhao: %s\nEnglish translation: %s" % (e["target"], e["source"]) for e in examples]
    return "\n\n".join([head] + pairs)


def glossary_block(entries, with_pos):
    head = ("To help with the translation, here is a word list between English and Dhao in the "
            "format: English word (pos tag) -> Dhao word:")
    lines = []
    for e in entries:
        if with_pos and e.get("pos"):
            lines.append("- %s (%s) -> %s" % (e["source_word"], e["pos"], e["target_word"]))
        else:
            lines.append("- %s -> %s" % (e["source_word"], e["target_word"]))
    return "\n".join([head] + lines)


def user(mode, examples, glossary, with_pos):
    blocks = []
    if examples:
        blocks.append(examples_block(examples))
    if glossary:
        blocks.append(glossary_block(glossary, with_pos))
    blocks.append("Source text (English): " + inputs["source"])
    if mode == "direct":
        blocks.append("Translate the above text from English to Dhao:")
    else:
        blocks.append("Machine translation (Dhao): " + inputs["draft"])
        blocks.append("Correct the machine translation if necessary:")
    return "\n\n".join(blocks)


def write(name, text):
    with open(name, "w", encoding="utf-8", newline="") as f:
        f.write(text)


for mode in ("direct", "postedit"):
    write("%s.system.txt" % mode, SYSTEM[mode])
    for ctx in ("none", "examples", "glossary", "examples_glossary"):
        for pos in ("pos", "nopos"):
            ex = inputs["examples"] if "examples" in ctx else []
            gl = inputs["glossary"] if "glossary" in ctx else []
            write("%s_%s_%s.user.txt" % (mode, ctx, pos), user(mode, ex, gl, pos == "pos"))
