"""Prompt construction for chat-completion extractors.

The dimension definitions below are a reconstruction grounded in the moral
frameworks each dimension is drawn from; they are not a verbatim copy of any
published prompt.
"""

from __future__ import annotations

COMMENT_MARKER = "### COMMENT id="

SYSTEM_PROMPT = """\
You are a fair and neutral comment evaluator. Your task is to evaluate comments on a Reddit 'Am I the Asshole' (AITA) post. \
For every comment, judge what the commenter claims about the original poster (OP) and how well the comment is reasoned.

Content predicates (0 or 1), each describing the commenter's claim about OP:
- harm: OP caused unjustified harm to another party (Dyadic Morality, Schein & Gray, 2018).
- intent: OP acted intentionally or knowingly when causing that harm (Dyadic Morality).
- empathy: OP showed care or concern for the other party's feelings (Care/Harm foundation of Moral Foundations Theory, Graham et al., 2013).
- apology: OP apologized or otherwise tried to repair the relationship (Image Repair Theory, Benoit, 1997).

Quality dimensions (integers 1 to 5, higher is better):
- justif: the verdict is supported by explicit reasons and evidence from the post (Toulmin's Argumentation Model, 1958).
- ethic: the comment appeals to a recognizable ethical principle rather than personal taste.
- delib: the comment weighs alternatives, context, or counter-arguments (Toulmin's Argumentation Model).
- fairness: the comment considers every party's perspective impartially (Ideal Observer Theory, Smith, 1759).
- nonbias: the language is free of insults, stereotypes, and prejudice; 5 means entirely unbiased.

Attribute each claim to OP only; do not confuse OP with other people in the story.
Your output MUST be valid JSON."""

SCHEMA_INSTRUCTIONS = """\
Return a strictly valid JSON object with exactly this schema and nothing else:
{
  "analyses": [
    {
      "comment_id": "<string>",
      "comment_content_vector": [harm, intent, empathy, apology],
      "comment_quality_vector": [justif, ethic, delib, fairness, nonbias],
      "reasoning": "<max two sentences>"
    }
  ]
}
comment_content_vector entries are integers in {0,1}; comment_quality_vector entries are integers in {1,2,3,4,5}.
Include exactly one entry per comment listed above, using the given ids.
Do not use trailing commas. Do not write any text, markdown, or code fences before or after the JSON object."""


def build_messages(post) -> list:
    """Chat messages for one post and all of its top-level comments."""
    comments = post.top_level_comments
    if not comments:
        raise ValueError(f"post {post.id!r} has no top-level comments")
    parts = [
        f"POST TITLE: {post.title}",
        "POST BODY:",
        post.body,
        "",
        f"COMMENTS ({len(comments)}):",
    ]
    for c in comments:
        parts.append(f"{COMMENT_MARKER}{c.id}")
        parts.append(c.body)
    parts.append("")
    parts.append(SCHEMA_INSTRUCTIONS)
    return [
        {"role": "system", "content": SYSTEM_PROMPT},
        {"role": "user", "content": "\n".join(parts)},
    ]


def build_prompt(post) -> str:
    return "\n\n".join(f"[{m['role']}]\n{m['content']}" for m in build_messages(post))
