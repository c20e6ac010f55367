import re


def main(html):
    triples = []
    for line in re.findall(r"<li[^>]*>([^<]+)</li>", html):
        parts = [p.strip() for p in line.split("|")]
        if len(parts) == 3:
            triples.append(tuple(parts))
    if not triples:
        triples.append(("page", "length", len(html)))
    return triples
