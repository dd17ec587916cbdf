#!/usr/bin/env python3
"""Regenerates the bundled annotated corpora.

    python3 generate.py            # writes mini_corpus.jsonl and verb_only.jsonl

Every sentence pattern below is annotated by hand: Penn POS tags, dependency
heads (sentence-relative here, converted to global indices on output),
dependency relations and BIO chunk tags. Slots in braces are filled from the
word lists; `#X` marks a number slot that becomes a quantity mention.
Output is deterministic.
"""

import json
import random
from fractions import Fraction
from pathlib import Path

HERE = Path(__file__).resolve().parent

VERB_LEMMAS = {
    "had": "have", "has": "have", "have": "have", "gave": "give", "found": "find",
    "bought": "buy", "buy": "buy", "picked": "pick", "got": "get", "get": "get",
    "lost": "lose", "sold": "sell", "ate": "eat", "washed": "wash", "make": "make",
    "shared": "share", "divided": "divide", "put": "put", "packed": "pack",
    "are": "be", "is": "be", "comes": "come", "added": "add", "holds": "hold",
    "baked": "bake", "does": "do", "did": "do", "received": "receive", "won": "win",
    "collected": "collect", "owns": "own", "gives": "give", "earned": "earn",
    "cost": "cost", "costs": "cost", "drove": "drive", "was": "be", "organizing": "organize",
    "making": "make",
}

NAMES = ["Tom", "Mary", "Sara", "Dan", "Joan", "Fred", "Mike", "Jessica", "Keith",
         "Alyssa", "Sandy", "Jason", "Nancy", "Tim", "Sally", "Benny", "Melanie",
         "Jenny", "Alex", "Ruby"]
PRONOUN = {"Tom": "He", "Dan": "He", "Fred": "He", "Mike": "He", "Keith": "He",
           "Jason": "He", "Tim": "He", "Benny": "He", "Alex": "He"}

# (plural, singular)
OBJECTS = [("apples", "apple"), ("marbles", "marble"), ("cookies", "cookie"),
           ("pencils", "pencil"), ("stickers", "sticker"), ("books", "book"),
           ("oranges", "orange"), ("cards", "card"), ("balloons", "balloon"),
           ("seashells", "seashell"), ("crayons", "crayon"), ("eggs", "egg")]
BOXES = [("boxes", "box"), ("bags", "bag"), ("baskets", "basket"), ("packs", "pack"),
         ("jars", "jar"), ("crates", "crate"), ("trays", "tray")]
PEOPLE = [("friends", "friend"), ("students", "student"), ("cousins", "cousin"),
          ("children", "child"), ("neighbors", "neighbor")]
PLACES = [("pile", "desk"), ("bowl", "table"), ("heap", "floor"), ("stack", "shelf"),
          ("basket", "counter")]


def tok(text, pos, head, dep, chunk):
    return (text, pos, head, dep, chunk)


class Builder:
    def __init__(self, pid, fold):
        self.pid = pid
        self.fold = fold
        self.tokens = []
        self.quantities = []  # (slot, global token index)
        self.sentence = 0

    def sentence_(self, toks, slots, numbers):
        base = len(self.tokens)
        for text, pos, head, dep, chunk in toks:
            number_slot = None
            if text.startswith("#"):
                number_slot = text[1:]
                text = str(numbers[number_slot])
            else:
                text = text.format(**slots)
            record = {
                "text": text,
                "pos": pos,
                "head": -1 if head < 0 else base + head,
                "deprel": dep,
                "chunk": chunk,
                "sentence_id": self.sentence,
            }
            if pos.startswith("VB") and text.lower() in VERB_LEMMAS:
                record["lemma"] = VERB_LEMMAS[text.lower()]
            if number_slot is not None:
                self.quantities.append((number_slot, len(self.tokens)))
            self.tokens.append(record)
        self.sentence += 1

    def finish(self, numbers, gold_slots, answer):
        """`gold_slots` is a prefix tree over slot names, e.g. "(+ A B)"."""
        order = {slot: i for i, (slot, _) in enumerate(self.quantities)}
        gold = gold_slots
        for slot in sorted(order, key=len, reverse=True):
            gold = gold.replace("%" + slot, "q%d" % order[slot])
        text = " ".join(t["text"] for t in self.tokens)
        for p in [" .", " ?", " ,"]:
            text = text.replace(p, p.strip())
        text = text.replace("$ ", "$")
        return {
            "id": self.pid,
            "text": text,
            "tokens": self.tokens,
            "quantities": [
                {"index": i, "value": str(numbers[slot]), "token": pos}
                for i, (slot, pos) in enumerate(self.quantities)
            ],
            "answer": fmt(answer),
            "gold_tree": gold,
            "fold": self.fold,
        }


def fmt(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return str(float(x))


# --- sentence patterns -------------------------------------------------------

def s_had(name, verb="had"):
    # NAME had #N OBJ .
    return [tok(name, "NNP", 1, "nsubj", "B-NP"), tok(verb, "VBD", -1, "root", "B-VP"),
            tok("#A", "CD", 3, "nummod", "B-NP"), tok("{obj}", "NNS", 1, "dobj", "I-NP"),
            tok(".", ".", 1, "punct", "O")]


def s_how_many_have(subject):
    # How many OBJ does SUBJ have now ?
    return [tok("How", "WRB", 1, "advmod", "B-ADVP"), tok("many", "JJ", 2, "amod", "B-NP"),
            tok("{obj}", "NNS", 5, "dobj", "I-NP"), tok("does", "VBZ", 5, "aux", "B-VP"),
            tok(subject, "NNP" if subject[0].isupper() and subject not in ("He", "She") else "PRP",
                5, "nsubj", "B-NP"),
            tok("have", "VB", -1, "root", "B-VP"), tok("now", "RB", 5, "advmod", "B-ADVP"),
            tok("?", ".", 5, "punct", "O")]


def with_slot(pattern, old, new):
    return [tok(new if t[0] == old else t[0], *t[1:]) for t in pattern]


def t_add(b, rng, slots):
    verb = rng.choice(["gave", "gave", "gave"])
    a, c = rng.randint(3, 60), rng.randint(2, 40)
    nums = {"A": a, "B": c}
    b.sentence_(s_had(slots["name"]), slots, nums)
    b.sentence_([tok(slots["name2"], "NNP", 1, "nsubj", "B-NP"), tok(verb, "VBD", -1, "root", "B-VP"),
                 tok(slots["name"], "NNP", 1, "iobj", "B-NP"), tok("#B", "CD", 5, "nummod", "B-NP"),
                 tok("more", "JJR", 5, "amod", "I-NP"), tok("{obj}", "NNS", 1, "dobj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    b.sentence_(s_how_many_have(slots["name"]), slots, nums)
    return nums, "(+ %A %B)", a + c


def t_sub(b, rng, slots):
    verb = rng.choice(["gave", "lost", "sold"])
    c = rng.randint(2, 30)
    a = c + rng.randint(3, 40)
    nums = {"A": a, "B": c}
    b.sentence_(s_had(slots["name"]), slots, nums)
    if verb == "gave":
        rest = [tok("to", "IN", 1, "prep", "B-PP"), tok(slots["name2"], "NNP", 4, "pobj", "B-NP")]
    else:
        rest = [tok("at", "IN", 1, "prep", "B-PP"), tok("school", "NN", 4, "pobj", "B-NP")]
    b.sentence_([tok(slots["pron"], "PRP", 1, "nsubj", "B-NP"), tok(verb, "VBD", -1, "root", "B-VP"),
                 tok("#B", "CD", 3, "nummod", "B-NP"), tok("{obj}", "NNS", 1, "dobj", "I-NP")]
                + rest + [tok(".", ".", 1, "punct", "O")], slots, nums)
    b.sentence_(s_how_many_have(slots["name"]), slots, nums)
    return nums, "(- %A %B)", a - c


def t_subrev(b, rng, slots):
    a = rng.randint(10, 90)
    c = a + rng.randint(5, 60)
    nums = {"A": a, "B": c}
    # Last week NAME had $A .
    b.sentence_([tok("Last", "JJ", 1, "amod", "B-NP"), tok("week", "NN", 3, "npadvmod", "I-NP"),
                 tok(slots["name"], "NNP", 3, "nsubj", "B-NP"), tok("had", "VBD", -1, "root", "B-VP"),
                 tok("$", "$", 3, "dobj", "B-NP"), tok("#A", "CD", 4, "nummod", "I-NP"),
                 tok(".", ".", 3, "punct", "O")], slots, nums)
    # PRON washed cars over the weekend and now has $B .
    job = rng.choice([("washed", "cars"), ("mowed", "lawns"), ("walked", "dogs")])
    b.sentence_([tok(slots["pron"], "PRP", 1, "nsubj", "B-NP"), tok(job[0], "VBD", -1, "root", "B-VP"),
                 tok(job[1], "NNS", 1, "dobj", "B-NP"), tok("over", "IN", 1, "prep", "B-PP"),
                 tok("the", "DT", 5, "det", "B-NP"), tok("weekend", "NN", 3, "pobj", "I-NP"),
                 tok("and", "CC", 1, "cc", "O"), tok("now", "RB", 8, "advmod", "B-ADVP"),
                 tok("has", "VBZ", 1, "conj", "B-VP"), tok("$", "$", 8, "dobj", "B-NP"),
                 tok("#B", "CD", 9, "nummod", "I-NP"), tok(".", ".", 1, "punct", "O")], slots, nums)
    # How much money did PRON make ?
    b.sentence_([tok("How", "WRB", 1, "advmod", "B-ADVP"), tok("much", "JJ", 2, "amod", "B-NP"),
                 tok("money", "NN", 5, "dobj", "I-NP"), tok("did", "VBD", 5, "aux", "B-VP"),
                 tok(slots["pron"].lower(), "PRP", 5, "nsubj", "B-NP"), tok("make", "VB", -1, "root", "B-VP"),
                 tok("?", ".", 5, "punct", "O")], slots, nums)
    return nums, "(- %B %A)", c - a


def t_compare(b, rng, slots):
    a, c = rng.sample(range(4, 70), 2)
    nums = {"A": a, "B": c}
    b.sentence_([tok(slots["name"], "NNP", 1, "nsubj", "B-NP"), tok("has", "VBZ", -1, "root", "B-VP"),
                 tok("#A", "CD", 3, "nummod", "B-NP"), tok("{obj}", "NNS", 1, "dobj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    b.sentence_([tok(slots["name2"], "NNP", 1, "nsubj", "B-NP"), tok("has", "VBZ", -1, "root", "B-VP"),
                 tok("#B", "CD", 3, "nummod", "B-NP"), tok("{obj}", "NNS", 1, "dobj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    more, less = (slots["name"], slots["name2"]) if a > c else (slots["name2"], slots["name"])
    # How many more OBJ does MORE have than LESS ?
    b.sentence_([tok("How", "WRB", 1, "advmod", "B-ADVP"), tok("many", "JJ", 3, "amod", "B-NP"),
                 tok("more", "JJR", 3, "amod", "I-NP"), tok("{obj}", "NNS", 6, "dobj", "I-NP"),
                 tok("does", "VBZ", 6, "aux", "B-VP"), tok(more, "NNP", 6, "nsubj", "B-NP"),
                 tok("have", "VB", -1, "root", "B-VP"), tok("than", "IN", 6, "prep", "B-PP"),
                 tok(less, "NNP", 7, "pobj", "B-NP"), tok("?", ".", 6, "punct", "O")], slots, nums)
    gold = "(- %A %B)" if a > c else "(- %B %A)"
    return nums, gold, abs(a - c)


def t_mul(b, rng, slots):
    a, c = rng.randint(2, 12), rng.randint(2, 9)
    nums = {"A": a, "B": c}
    if rng.random() < 0.5:
        # Each BOX has A OBJ .
        b.sentence_([tok("Each", "DT", 1, "det", "B-NP"), tok("{box}", "NN", 2, "nsubj", "I-NP"),
                     tok("has", "VBZ", -1, "root", "B-VP"), tok("#A", "CD", 4, "nummod", "B-NP"),
                     tok("{obj}", "NNS", 2, "dobj", "I-NP"), tok(".", ".", 2, "punct", "O")], slots, nums)
    else:
        # Each of the BOXES has A OBJ .
        b.sentence_([tok("Each", "DT", 4, "nsubj", "B-NP"), tok("of", "IN", 0, "prep", "B-PP"),
                     tok("the", "DT", 3, "det", "B-NP"), tok("{boxes}", "NNS", 1, "pobj", "I-NP"),
                     tok("has", "VBZ", -1, "root", "B-VP"), tok("#A", "CD", 6, "nummod", "B-NP"),
                     tok("{obj}", "NNS", 4, "dobj", "I-NP"), tok(".", ".", 4, "punct", "O")], slots, nums)
    b.sentence_([tok(slots["name"], "NNP", 1, "nsubj", "B-NP"), tok("bought", "VBD", -1, "root", "B-VP"),
                 tok("#B", "CD", 3, "nummod", "B-NP"), tok("{boxes}", "NNS", 1, "dobj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    b.sentence_([tok("How", "WRB", 1, "advmod", "B-ADVP"), tok("many", "JJ", 2, "amod", "B-NP"),
                 tok("{obj}", "NNS", 5, "dobj", "I-NP"), tok("did", "VBD", 5, "aux", "B-VP"),
                 tok(slots["pron"].lower(), "PRP", 5, "nsubj", "B-NP"), tok("buy", "VB", -1, "root", "B-VP"),
                 tok("?", ".", 5, "punct", "O")], slots, nums)
    return nums, "(* %A %B)", a * c


def t_div(b, rng, slots):
    c = rng.randint(2, 9)
    a = c * rng.randint(2, 12)
    nums = {"A": a, "B": c}
    b.sentence_([tok(slots["name"], "NNP", 1, "nsubj", "B-NP"), tok("has", "VBZ", -1, "root", "B-VP"),
                 tok("#A", "CD", 3, "nummod", "B-NP"), tok("{obj}", "NNS", 1, "dobj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    # PRON shared them equally among B PEOPLE .
    b.sentence_([tok(slots["pron"], "PRP", 1, "nsubj", "B-NP"), tok("shared", "VBD", -1, "root", "B-VP"),
                 tok("them", "PRP", 1, "dobj", "B-NP"), tok("equally", "RB", 1, "advmod", "B-ADVP"),
                 tok("among", "IN", 1, "prep", "B-PP"), tok("#B", "CD", 6, "nummod", "B-NP"),
                 tok("{people}", "NNS", 4, "pobj", "I-NP"), tok(".", ".", 1, "punct", "O")], slots, nums)
    # How many OBJ did each PERSON get ?
    b.sentence_([tok("How", "WRB", 1, "advmod", "B-ADVP"), tok("many", "JJ", 2, "amod", "B-NP"),
                 tok("{obj}", "NNS", 6, "dobj", "I-NP"), tok("did", "VBD", 6, "aux", "B-VP"),
                 tok("each", "DT", 5, "det", "B-NP"), tok("{person}", "NN", 6, "nsubj", "I-NP"),
                 tok("get", "VB", -1, "root", "B-VP"), tok("?", ".", 6, "punct", "O")], slots, nums)
    return nums, "(/ %A %B)", Fraction(a, c)


def t_divrev(b, rng, slots):
    a = rng.randint(2, 9)
    c = a * rng.randint(2, 12)
    nums = {"A": a, "B": c}
    b.sentence_([tok(slots["name"], "NNP", 1, "nsubj", "B-NP"), tok("has", "VBZ", -1, "root", "B-VP"),
                 tok("#A", "CD", 3, "nummod", "B-NP"), tok("{boxes}", "NNS", 1, "dobj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    # PRON packed B OBJ equally into the BOXES .
    b.sentence_([tok(slots["pron"], "PRP", 1, "nsubj", "B-NP"), tok("packed", "VBD", -1, "root", "B-VP"),
                 tok("#B", "CD", 3, "nummod", "B-NP"), tok("{obj}", "NNS", 1, "dobj", "I-NP"),
                 tok("equally", "RB", 1, "advmod", "B-ADVP"), tok("into", "IN", 1, "prep", "B-PP"),
                 tok("the", "DT", 7, "det", "B-NP"), tok("{boxes}", "NNS", 5, "pobj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    # How many OBJ are in each BOX ?
    b.sentence_([tok("How", "WRB", 1, "advmod", "B-ADVP"), tok("many", "JJ", 2, "amod", "B-NP"),
                 tok("{obj}", "NNS", 3, "nsubj", "I-NP"), tok("are", "VBP", -1, "root", "B-VP"),
                 tok("in", "IN", 3, "prep", "B-PP"), tok("each", "DT", 6, "det", "B-NP"),
                 tok("{box}", "NN", 4, "pobj", "I-NP"), tok("?", ".", 3, "punct", "O")], slots, nums)
    return nums, "(/ %B %A)", Fraction(c, a)


def t_pile(b, rng, slots):
    a, c, d = rng.randint(3, 30), rng.randint(2, 20), rng.randint(6, 24)
    nums = {"A": a, "C": d, "B": c}
    place, surface = slots["place"]
    # There are A OBJ in a PLACE on the SURFACE .
    b.sentence_([tok("There", "EX", 1, "expl", "B-NP"), tok("are", "VBP", -1, "root", "B-VP"),
                 tok("#A", "CD", 3, "nummod", "B-NP"), tok("{obj}", "NNS", 1, "nsubj", "I-NP"),
                 tok("in", "IN", 3, "prep", "B-PP"), tok("a", "DT", 6, "det", "B-NP"),
                 tok(place, "NN", 4, "pobj", "I-NP"), tok("on", "IN", 6, "prep", "B-PP"),
                 tok("the", "DT", 9, "det", "B-NP"), tok(surface, "NN", 7, "pobj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    # Each OBJ1 comes in a package of C .
    b.sentence_([tok("Each", "DT", 1, "det", "B-NP"), tok("{obj1}", "NN", 2, "nsubj", "I-NP"),
                 tok("comes", "VBZ", -1, "root", "B-VP"), tok("in", "IN", 2, "prep", "B-PP"),
                 tok("a", "DT", 5, "det", "B-NP"), tok("package", "NN", 3, "pobj", "I-NP"),
                 tok("of", "IN", 5, "prep", "B-PP"), tok("#C", "CD", 6, "pobj", "B-NP"),
                 tok(".", ".", 2, "punct", "O")], slots, nums)
    # B OBJ are added to the PLACE .
    b.sentence_([tok("#B", "CD", 1, "nummod", "B-NP"), tok("{obj}", "NNS", 3, "nsubjpass", "I-NP"),
                 tok("are", "VBP", 3, "auxpass", "B-VP"), tok("added", "VBN", -1, "root", "I-VP"),
                 tok("to", "IN", 3, "prep", "B-PP"), tok("the", "DT", 6, "det", "B-NP"),
                 tok(place, "NN", 4, "pobj", "I-NP"), tok(".", ".", 3, "punct", "O")], slots, nums)
    # How many OBJ are there in the PLACE ?
    b.sentence_([tok("How", "WRB", 1, "advmod", "B-ADVP"), tok("many", "JJ", 2, "amod", "B-NP"),
                 tok("{obj}", "NNS", 3, "nsubj", "I-NP"), tok("are", "VBP", -1, "root", "B-VP"),
                 tok("there", "EX", 3, "expl", "B-NP"), tok("in", "IN", 3, "prep", "B-PP"),
                 tok("the", "DT", 7, "det", "B-NP"), tok(place, "NN", 5, "pobj", "I-NP"),
                 tok("?", ".", 3, "punct", "O")], slots, nums)
    return nums, "(+ %A %B)", a + c


def t_age(b, rng, slots):
    age, a, c = rng.randint(6, 14), rng.randint(3, 40), rng.randint(2, 30)
    nums = {"Y": age, "A": a, "B": c}
    # NAME is Y years old .
    b.sentence_([tok(slots["name"], "NNP", 1, "nsubj", "B-NP"), tok("is", "VBZ", -1, "root", "B-VP"),
                 tok("#Y", "CD", 3, "nummod", "B-NP"), tok("years", "NNS", 4, "npadvmod", "I-NP"),
                 tok("old", "JJ", 1, "acomp", "B-ADJP"), tok(".", ".", 1, "punct", "O")], slots, nums)
    b.sentence_(s_had(slots["pron"]), slots, nums)
    # PRON bought B more OBJ at the store .
    b.sentence_([tok(slots["pron"], "PRP", 1, "nsubj", "B-NP"), tok("bought", "VBD", -1, "root", "B-VP"),
                 tok("#B", "CD", 4, "nummod", "B-NP"), tok("more", "JJR", 4, "amod", "I-NP"),
                 tok("{obj}", "NNS", 1, "dobj", "I-NP"), tok("at", "IN", 1, "prep", "B-PP"),
                 tok("the", "DT", 7, "det", "B-NP"), tok("store", "NN", 5, "pobj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    b.sentence_(s_how_many_have(slots["pron"].lower()), slots, nums)
    return nums, "(+ %A %B)", a + c


def t_rate_sum(b, rng, slots):
    # (B + C) * A
    a, c, d = rng.randint(2, 12), rng.randint(2, 9), rng.randint(2, 9)
    nums = {"A": a, "B": c, "C": d}
    # Each of the BOXES holds A OBJ .
    b.sentence_([tok("Each", "DT", 4, "nsubj", "B-NP"), tok("of", "IN", 0, "prep", "B-PP"),
                 tok("the", "DT", 3, "det", "B-NP"), tok("{boxes}", "NNS", 1, "pobj", "I-NP"),
                 tok("holds", "VBZ", -1, "root", "B-VP"), tok("#A", "CD", 6, "nummod", "B-NP"),
                 tok("{obj}", "NNS", 4, "dobj", "I-NP"), tok(".", ".", 4, "punct", "O")], slots, nums)
    # NAME has B BOXES of OBJ in the kitchen and C BOXES of OBJ in the garage .
    b.sentence_([tok(slots["name"], "NNP", 1, "nsubj", "B-NP"), tok("has", "VBZ", -1, "root", "B-VP"),
                 tok("#B", "CD", 3, "nummod", "B-NP"), tok("{boxes}", "NNS", 1, "dobj", "I-NP"),
                 tok("of", "IN", 3, "prep", "B-PP"), tok("{obj}", "NNS", 4, "pobj", "B-NP"),
                 tok("in", "IN", 3, "prep", "B-PP"), tok("the", "DT", 8, "det", "B-NP"),
                 tok("kitchen", "NN", 6, "pobj", "I-NP"), tok("and", "CC", 3, "cc", "O"),
                 tok("#C", "CD", 11, "nummod", "B-NP"), tok("{boxes}", "NNS", 3, "conj", "I-NP"),
                 tok("of", "IN", 11, "prep", "B-PP"), tok("{obj}", "NNS", 12, "pobj", "B-NP"),
                 tok("in", "IN", 11, "prep", "B-PP"), tok("the", "DT", 16, "det", "B-NP"),
                 tok("garage", "NN", 14, "pobj", "I-NP"), tok(".", ".", 1, "punct", "O")], slots, nums)
    b.sentence_(s_how_many_have(slots["pron"].lower()), slots, nums)
    return nums, "(* %A (+ %B %C))", a * (c + d)


def t_sum_share(b, rng, slots):
    # (A + B) / C
    d = rng.randint(2, 8)
    total = d * rng.randint(3, 12)
    a = rng.randint(1, total - 1)
    c = total - a
    nums = {"A": a, "B": c, "C": d}
    b.sentence_(s_had(slots["name"]), slots, nums)
    # PRON found B more OBJ .
    b.sentence_([tok(slots["pron"], "PRP", 1, "nsubj", "B-NP"), tok("found", "VBD", -1, "root", "B-VP"),
                 tok("#B", "CD", 4, "nummod", "B-NP"), tok("more", "JJR", 4, "amod", "I-NP"),
                 tok("{obj}", "NNS", 1, "dobj", "I-NP"), tok(".", ".", 1, "punct", "O")], slots, nums)
    # PRON shared the OBJ equally among C PEOPLE .
    b.sentence_([tok(slots["pron"], "PRP", 1, "nsubj", "B-NP"), tok("shared", "VBD", -1, "root", "B-VP"),
                 tok("the", "DT", 3, "det", "B-NP"), tok("{obj}", "NNS", 1, "dobj", "I-NP"),
                 tok("equally", "RB", 1, "advmod", "B-ADVP"), tok("among", "IN", 1, "prep", "B-PP"),
                 tok("#C", "CD", 7, "nummod", "B-NP"), tok("{people}", "NNS", 5, "pobj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    b.sentence_([tok("How", "WRB", 1, "advmod", "B-ADVP"), tok("many", "JJ", 2, "amod", "B-NP"),
                 tok("{obj}", "NNS", 6, "dobj", "I-NP"), tok("did", "VBD", 6, "aux", "B-VP"),
                 tok("each", "DT", 5, "det", "B-NP"), tok("{person}", "NN", 6, "nsubj", "I-NP"),
                 tok("get", "VB", -1, "root", "B-VP"), tok("?", ".", 6, "punct", "O")], slots, nums)
    return nums, "(/ (+ %A %B) %C)", Fraction(a + c, d)


def t_left_times(b, rng, slots):
    # (A - B) * C
    c = rng.randint(1, 8)
    a = c + rng.randint(2, 9)
    d = rng.randint(2, 12)
    nums = {"A": a, "B": c, "C": d}
    # NAME had A BOXES of OBJ .
    b.sentence_([tok(slots["name"], "NNP", 1, "nsubj", "B-NP"), tok("had", "VBD", -1, "root", "B-VP"),
                 tok("#A", "CD", 3, "nummod", "B-NP"), tok("{boxes}", "NNS", 1, "dobj", "I-NP"),
                 tok("of", "IN", 3, "prep", "B-PP"), tok("{obj}", "NNS", 4, "pobj", "B-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    # PRON gave away B BOXES of OBJ .
    b.sentence_([tok(slots["pron"], "PRP", 1, "nsubj", "B-NP"), tok("gave", "VBD", -1, "root", "B-VP"),
                 tok("away", "RP", 1, "prt", "B-PRT"), tok("#B", "CD", 4, "nummod", "B-NP"),
                 tok("{boxes}", "NNS", 1, "dobj", "I-NP"), tok("of", "IN", 4, "prep", "B-PP"),
                 tok("{obj}", "NNS", 5, "pobj", "B-NP"), tok(".", ".", 1, "punct", "O")], slots, nums)
    # Each of the BOXES has C OBJ .
    b.sentence_([tok("Each", "DT", 4, "nsubj", "B-NP"), tok("of", "IN", 0, "prep", "B-PP"),
                 tok("the", "DT", 3, "det", "B-NP"), tok("{boxes}", "NNS", 1, "pobj", "I-NP"),
                 tok("has", "VBZ", -1, "root", "B-VP"), tok("#C", "CD", 6, "nummod", "B-NP"),
                 tok("{obj}", "NNS", 4, "dobj", "I-NP"), tok(".", ".", 4, "punct", "O")], slots, nums)
    b.sentence_(s_how_many_have(slots["pron"].lower()), slots, nums)
    return nums, "(* (- %A %B) %C)", (a - c) * d


TEMPLATES = [t_add, t_sub, t_subrev, t_compare, t_mul, t_div, t_divrev, t_pile, t_age,
             t_rate_sum, t_sum_share, t_left_times]
PER_TEMPLATE = 5


def slots_for(rng):
    name, name2 = rng.sample(NAMES, 2)
    obj, obj1 = rng.choice(OBJECTS)
    boxes, box = rng.choice(BOXES)
    people, person = rng.choice(PEOPLE)
    return {
        "name": name, "name2": name2, "pron": PRONOUN.get(name, "She"),
        "obj": obj, "obj1": obj1, "boxes": boxes, "box": box,
        "people": people, "person": person, "place": rng.choice(PLACES),
    }


# --- hand-annotated renditions of the worked examples --------------------------

def bookcase():
    b = Builder("bookcase", 0)
    nums = {"A": 9, "T": 2, "B": 3, "C": 5}
    s = {}
    # Gwen was organizing her book case making sure each of the shelves had exactly 9 books on it .
    b.sentence_([tok("Gwen", "NNP", 2, "nsubj", "B-NP"), tok("was", "VBD", 2, "aux", "B-VP"),
                 tok("organizing", "VBG", -1, "root", "I-VP"), tok("her", "PRP$", 5, "poss", "B-NP"),
                 tok("book", "NN", 5, "compound", "I-NP"), tok("case", "NN", 2, "dobj", "I-NP"),
                 tok("making", "VBG", 2, "xcomp", "B-VP"), tok("sure", "JJ", 6, "acomp", "B-ADJP"),
                 tok("each", "DT", 12, "nsubj", "B-NP"), tok("of", "IN", 8, "prep", "B-PP"),
                 tok("the", "DT", 11, "det", "B-NP"), tok("shelves", "NNS", 9, "pobj", "I-NP"),
                 tok("had", "VBD", 7, "ccomp", "B-VP"), tok("exactly", "RB", 14, "advmod", "B-NP"),
                 tok("#A", "CD", 15, "nummod", "I-NP"), tok("books", "NNS", 12, "dobj", "I-NP"),
                 tok("on", "IN", 12, "prep", "B-PP"), tok("it", "PRP", 16, "pobj", "B-NP"),
                 tok(".", ".", 2, "punct", "O")], s, nums)
    # She has 2 types of books - mystery books and picture books .
    b.sentence_([tok("She", "PRP", 1, "nsubj", "B-NP"), tok("has", "VBZ", -1, "root", "B-VP"),
                 tok("#T", "CD", 3, "nummod", "B-NP"), tok("types", "NNS", 1, "dobj", "I-NP"),
                 tok("of", "IN", 3, "prep", "B-PP"), tok("books", "NNS", 4, "pobj", "B-NP"),
                 tok("-", ":", 3, "punct", "O"), tok("mystery", "NN", 8, "compound", "B-NP"),
                 tok("books", "NNS", 3, "appos", "I-NP"), tok("and", "CC", 8, "cc", "O"),
                 tok("picture", "NN", 11, "compound", "B-NP"), tok("books", "NNS", 8, "conj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], s, nums)
    # If she had 3 shelves of mystery books and 5 shelves of picture books , how many books did she have in total ?
    b.sentence_([tok("If", "IN", 2, "mark", "B-SBAR"), tok("she", "PRP", 2, "nsubj", "B-NP"),
                 tok("had", "VBD", 20, "advcl", "B-VP"), tok("#B", "CD", 4, "nummod", "B-NP"),
                 tok("shelves", "NNS", 2, "dobj", "I-NP"), tok("of", "IN", 4, "prep", "B-PP"),
                 tok("mystery", "NN", 7, "compound", "B-NP"), tok("books", "NNS", 5, "pobj", "I-NP"),
                 tok("and", "CC", 4, "cc", "O"), tok("#C", "CD", 10, "nummod", "B-NP"),
                 tok("shelves", "NNS", 4, "conj", "I-NP"), tok("of", "IN", 10, "prep", "B-PP"),
                 tok("picture", "NN", 13, "compound", "B-NP"), tok("books", "NNS", 11, "pobj", "I-NP"),
                 tok(",", ",", 20, "punct", "O"), tok("how", "WRB", 16, "advmod", "B-ADVP"),
                 tok("many", "JJ", 17, "amod", "B-NP"), tok("books", "NNS", 20, "dobj", "I-NP"),
                 tok("did", "VBD", 20, "aux", "B-VP"), tok("she", "PRP", 20, "nsubj", "B-NP"),
                 tok("have", "VB", -1, "root", "B-VP"), tok("in", "IN", 20, "prep", "B-PP"),
                 tok("total", "NN", 21, "pobj", "B-NP"), tok("?", ".", 20, "punct", "O")], s, nums)
    return b.finish(nums, "(* (+ %B %C) %A)", 72)


def tom_job():
    b = Builder("tom-job", 1)
    nums = {"A": 74, "B": 86}
    s = {}
    # Last week Tom had $74 .
    b.sentence_([tok("Last", "JJ", 1, "amod", "B-NP"), tok("week", "NN", 3, "npadvmod", "I-NP"),
                 tok("Tom", "NNP", 3, "nsubj", "B-NP"), tok("had", "VBD", -1, "root", "B-VP"),
                 tok("$", "$", 3, "dobj", "B-NP"), tok("#A", "CD", 4, "nummod", "I-NP"),
                 tok(".", ".", 3, "punct", "O")], s, nums)
    # He washed cars over the weekend and now has $86 .
    b.sentence_([tok("He", "PRP", 1, "nsubj", "B-NP"), tok("washed", "VBD", -1, "root", "B-VP"),
                 tok("cars", "NNS", 1, "dobj", "B-NP"), tok("over", "IN", 1, "prep", "B-PP"),
                 tok("the", "DT", 5, "det", "B-NP"), tok("weekend", "NN", 3, "pobj", "I-NP"),
                 tok("and", "CC", 1, "cc", "O"), tok("now", "RB", 8, "advmod", "B-ADVP"),
                 tok("has", "VBZ", 1, "conj", "B-VP"), tok("$", "$", 8, "dobj", "B-NP"),
                 tok("#B", "CD", 9, "nummod", "I-NP"), tok(".", ".", 1, "punct", "O")], s, nums)
    # How much money did he make from the job ?
    b.sentence_([tok("How", "WRB", 1, "advmod", "B-ADVP"), tok("much", "JJ", 2, "amod", "B-NP"),
                 tok("money", "NN", 5, "dobj", "I-NP"), tok("did", "VBD", 5, "aux", "B-VP"),
                 tok("he", "PRP", 5, "nsubj", "B-NP"), tok("make", "VB", -1, "root", "B-VP"),
                 tok("from", "IN", 5, "prep", "B-PP"), tok("the", "DT", 8, "det", "B-NP"),
                 tok("job", "NN", 6, "pobj", "I-NP"), tok("?", ".", 5, "punct", "O")], s, nums)
    return b.finish(nums, "(- %B %A)", 12)


def apple_pile():
    b = Builder("apple-pile", 2)
    nums = {"A": 8, "C": 11, "B": 5}
    slots = {"obj": "apples", "obj1": "apple", "place": ("pile", "desk")}
    return pile_fixed(b, slots, nums)


def pile_fixed(b, slots, nums):
    place, surface = slots["place"]
    b.sentence_([tok("There", "EX", 1, "expl", "B-NP"), tok("are", "VBP", -1, "root", "B-VP"),
                 tok("#A", "CD", 3, "nummod", "B-NP"), tok("{obj}", "NNS", 1, "nsubj", "I-NP"),
                 tok("in", "IN", 3, "prep", "B-PP"), tok("a", "DT", 6, "det", "B-NP"),
                 tok(place, "NN", 4, "pobj", "I-NP"), tok("on", "IN", 6, "prep", "B-PP"),
                 tok("the", "DT", 9, "det", "B-NP"), tok(surface, "NN", 7, "pobj", "I-NP"),
                 tok(".", ".", 1, "punct", "O")], slots, nums)
    b.sentence_([tok("Each", "DT", 1, "det", "B-NP"), tok("{obj1}", "NN", 2, "nsubj", "I-NP"),
                 tok("comes", "VBZ", -1, "root", "B-VP"), tok("in", "IN", 2, "prep", "B-PP"),
                 tok("a", "DT", 5, "det", "B-NP"), tok("package", "NN", 3, "pobj", "I-NP"),
                 tok("of", "IN", 5, "prep", "B-PP"), tok("#C", "CD", 6, "pobj", "B-NP"),
                 tok(".", ".", 2, "punct", "O")], slots, nums)
    b.sentence_([tok("#B", "CD", 1, "nummod", "B-NP"), tok("{obj}", "NNS", 3, "nsubjpass", "I-NP"),
                 tok("are", "VBP", 3, "auxpass", "B-VP"), tok("added", "VBN", -1, "root", "I-VP"),
                 tok("to", "IN", 3, "prep", "B-PP"), tok("the", "DT", 6, "det", "B-NP"),
                 tok(place, "NN", 4, "pobj", "I-NP"), tok(".", ".", 3, "punct", "O")], slots, nums)
    b.sentence_([tok("How", "WRB", 1, "advmod", "B-ADVP"), tok("many", "JJ", 2, "amod", "B-NP"),
                 tok("{obj}", "NNS", 3, "nsubj", "I-NP"), tok("are", "VBP", -1, "root", "B-VP"),
                 tok("there", "EX", 3, "expl", "B-NP"), tok("in", "IN", 3, "prep", "B-PP"),
                 tok("the", "DT", 7, "det", "B-NP"), tok(place, "NN", 5, "pobj", "I-NP"),
                 tok("?", ".", 3, "punct", "O")], slots, nums)
    return b.finish(nums, "(+ %A %B)", nums["A"] + nums["B"])


def mini_corpus():
    rng = random.Random(2015)
    records = [bookcase(), tom_job(), apple_pile()]
    for k in range(PER_TEMPLATE):
        for t in TEMPLATES:
            slots = slots_for(rng)
            b = Builder("%s-%d" % (t.__name__[2:].replace("_", "-"), k), k % 3)
            nums, gold, answer = t(b, rng, slots)
            records.append(b.finish(nums, gold, answer))
    return records


def verb_only_corpus():
    """Two-quantity problems whose labels are decided by the second verb alone."""
    rng = random.Random(7)
    add_verbs = ["found", "got", "received", "won"]
    sub_verbs = ["lost", "gave", "sold", "ate"]
    records = []
    for fold in range(3):
        for verb in add_verbs + sub_verbs:
            slots = slots_for(rng)
            c = rng.randint(2, 20)
            a = c + rng.randint(3, 30)
            nums = {"A": a, "B": c}
            b = Builder("verb-%s-%d" % (verb, fold), fold)
            b.sentence_(s_had(slots["name"]), slots, nums)
            b.sentence_([tok(slots["pron"], "PRP", 1, "nsubj", "B-NP"), tok(verb, "VBD", -1, "root", "B-VP"),
                         tok("#B", "CD", 3, "nummod", "B-NP"), tok("{obj}", "NNS", 1, "dobj", "I-NP"),
                         tok(".", ".", 1, "punct", "O")], slots, nums)
            b.sentence_(s_how_many_have(slots["name"]), slots, nums)
            if verb in add_verbs:
                records.append(b.finish(nums, "(+ %A %B)", a + c))
            else:
                records.append(b.finish(nums, "(- %A %B)", a - c))
    return records


def write(path, records):
    with open(path, "w") as f:
        for r in records:
            f.write(json.dumps(r, separators=(",", ":")) + "\n")


if __name__ == "__main__":
    write(HERE / "mini_corpus.jsonl", mini_corpus())
    write(HERE / "verb_only.jsonl", verb_only_corpus())
