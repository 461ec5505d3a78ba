#!/usr/bin/env python3
"""Build the bundled question bank and supporting corpus under data/.

Every question gets hand-written support sentences that pair its content
words with the correct answer; a handful of questions also get scattered
"distractor" documents that pair a wrong answer with the question words
far apart, so plain result counting is fooled while proximity scoring is
not.  The script validates its own output: support documents must match
the correct choice's first-stage query, distractor documents must match
the wrong choice's query while contributing zero proximity, and filler
text must avoid every answer token.

Run from the repository root:  python tools/build_data.py
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from quizminer.question_bank import Question, QuestionFlags, classify, tokenize  # noqa: E402
from quizminer.retrieval import LocalCorpusIndex, Document, build_query_plan  # noqa: E402
from quizminer.scoring import distance_score  # noqa: E402
from quizminer.stopwords import STOPWORDS  # noqa: E402

RADIUS = 20

# (id, level, text, choices, answer_index, support sentences, extras)
# extras: {"distract": (wrong_index, [lead sentences], [trail sentences])}
#         {"context": sentence}  -- inverted questions: answer without the key term
QUESTIONS = [
    # ---- level 1 ----
    ("q01", 1, "What is the capital of France?",
     ["Berlin", "Paris", "Rome", "Madrid"], 1,
     ["Paris is the capital of France and its largest city.",
      "Every guidebook notes that Paris, the capital of France, sits on the Seine."],
     {"distract": (0,
        ["Berlin hosts a lively film festival every February.",
         "Berlin rebuilt its museums over two busy decades."],
        ["Essayists compare capital cities, and France earns frequent mention."])}),
    ("q02", 1, "Which planet is known as the Red Planet?",
     ["Jupiter", "Mars", "Venus", "Mercury"], 1,
     ["Mars is known as the Red Planet because of its rusty dust.",
      "Astronomers note that Mars is widely known as the Red Planet."], {}),
    ("q03", 1, "How many days are in a week?",
     ["Five", "Six", "Seven", "Eight"], 2,
     ["A week has seven days, and children recite those days by heart.",
      "Seven days form one week on every modern calendar."], {}),
    ("q04", 1, "What color is a ripe banana?",
     ["Green", "Blue", "Yellow", "Red"], 2,
     ["A ripe banana turns yellow, the color children learn earliest.",
      "The color of a ripe banana is bright yellow."], {}),
    ("q05", 1, "Which animal says meow?",
     ["Dog", "Cat", "Cow", "Duck"], 1,
     ["The cat is the animal that says meow when it wants attention.",
      "Any child can tell you the animal that says meow is the cat."], {}),
    ("q06", 1, "What do bees make?",
     ["Bread", "Honey", "Milk", "Paper"], 1,
     ["Bees make honey from the nectar they gather all summer.",
      "Inside the hive, bees make honey and guard it fiercely."], {}),
    ("q07", 1, "Which season is the coldest?",
     ["Summer", "Winter", "Spring", "Autumn"], 1,
     ["Winter is the coldest season of the year in most lands.",
      "Of every season, winter brings the coldest mornings."], {}),
    # ---- level 2 ----
    ("q08", 2, "What is the largest ocean on Earth?",
     ["Atlantic", "Pacific", "Indian", "Arctic"], 1,
     ["The Pacific is the largest ocean on Earth by a wide margin.",
      "Covering a third of Earth, the Pacific ranks as the largest ocean."],
     {"distract": (0,
        ["The Atlantic carries the busiest shipping lanes in trade.",
         "The Atlantic churns beneath winter storms."],
        ["Sailors respect the largest swells, for the ocean girdling Earth varies greatly."])}),
    ("q09", 2, "Who wrote Romeo and Juliet?",
     ["Dickens", "Austen", "Shakespeare", "Tolstoy"], 2,
     ["William Shakespeare wrote Romeo and Juliet around 1595.",
      "Scholars agree Shakespeare wrote Romeo and Juliet for the playhouse."], {}),
    ("q10", 2, "Which country is home to the kangaroo?",
     ["Australia", "India", "Brazil", "Canada"], 0,
     ["Australia is the country the kangaroo calls home.",
      "The kangaroo is at home across Australia, a country of wide plains."], {}),
    ("q11", 2, "What is the chemical symbol for water?",
     ["CO2", "NaCl", "H2O", "O2"], 2,
     ["The chemical symbol for water is H2O.",
      "Chemists write water with the chemical symbol H2O."], {}),
    ("q12", 2, "How many continents are there on Earth?",
     ["Five", "Six", "Seven", "Eight"], 2,
     ["Earth has seven continents, counting icy Antarctica.",
      "Geography lessons list seven continents on Earth."], {}),
    ("q13", 2, "Which instrument has eighty eight keys?",
     ["Guitar", "Violin", "Piano", "Flute"], 2,
     ["A grand piano is an instrument with eighty eight keys.",
      "The piano, an instrument of eighty eight keys, anchors the concert hall."], {}),
    ("q14", 2, "What is the capital of Japan?",
     ["Kyoto", "Osaka", "Seoul", "Tokyo"], 3,
     ["Tokyo is the capital of Japan and its most crowded city.",
      "The capital of Japan moved to Tokyo in 1868."], {}),
    # ---- level 3 ----
    ("q15", 3, "Which gas do plants absorb from the air?",
     ["Oxygen", "Nitrogen", "Carbon dioxide", "Helium"], 2,
     ["Plants absorb carbon dioxide, the gas they draw from the air.",
      "From the air around them, plants absorb the gas carbon dioxide."], {}),
    ("q16", 3, "Who painted the Mona Lisa?",
     ["Leonardo da Vinci", "Pablo Picasso", "Claude Monet", "Vincent van Gogh"], 0,
     ["Leonardo da Vinci painted the Mona Lisa early in the 1500s.",
      "The Mona Lisa was painted by Leonardo da Vinci in Florence."], {}),
    ("q17", 3, "What is the longest river in the world?",
     ["Amazon", "Danube", "Nile", "Mississippi"], 2,
     ["The Nile is the longest river in the world by most measures.",
      "Most atlases call the Nile the longest river in the world."],
     {"distract": (0,
        ["The Amazon drains a basin of astonishing breadth.",
         "The Amazon floods its forests each wet season."],
        ["Hydrologists chart the longest channels; one river in the world resists easy measure."])}),
    ("q18", 3, "Which metal is liquid at room temperature?",
     ["Iron", "Mercury", "Gold", "Copper"], 1,
     ["Mercury is the only metal that stays liquid at room temperature.",
      "At room temperature the metal mercury flows as a silver liquid."], {}),
    ("q19", 3, "In which city is the Eiffel Tower located?",
     ["London", "New York", "Paris", "Moscow"], 2,
     ["The Eiffel Tower is located in the city of Paris.",
      "Visitors to the city of Paris find the Eiffel Tower located on the Champ de Mars."], {}),
    ("q20", 3, "How many strings does a standard violin have?",
     ["Six", "Four", "Five", "Seven"], 1,
     ["A standard violin has four strings tuned in fifths.",
      "Four strings stretch across every standard violin."], {}),
    ("q21", 3, "Which bird is famous for mimicking human speech?",
     ["Eagle", "Penguin", "Parrot", "Owl"], 2,
     ["The parrot is a bird famous for mimicking human speech.",
      "Famous for mimicking human speech, the parrot is a beloved bird."], {}),
    # ---- level 4 ----
    ("q22", 4, "Which element has the atomic number one?",
     ["Helium", "Oxygen", "Hydrogen", "Carbon"], 2,
     ["Hydrogen is the element with atomic number one.",
      "The lightest element, hydrogen, carries atomic number one."], {}),
    ("q23", 4, "What is the smallest prime number?",
     ["One", "Two", "Three", "Zero"], 1,
     ["Two is the smallest prime number; mathematicians exclude unity by definition.",
      "The smallest prime number is two, the sole even prime."], {}),
    ("q24", 4, "Which composer wrote the Ninth Symphony?",
     ["Mozart", "Bach", "Beethoven", "Brahms"], 2,
     ["The composer Beethoven wrote the Ninth Symphony while nearly deaf.",
      "No composer but Beethoven wrote a Ninth Symphony so beloved."], {}),
    ("q25", 4, "Which of these is not a mammal?",
     ["Whale", "Bat", "Penguin", "Elephant"], 2,
     ["The whale is a mammal that nurses its young at sea.",
      "A bat is the sole mammal capable of true flight.",
      "The elephant is the largest mammal walking the land."],
     {"context": "The penguin is a seabird that cannot fly but swims with grace."}),
    ("q26", 4, "What is the currency of Japan?",
     ["Won", "Yen", "Yuan", "Ringgit"], 1,
     ["The yen is the official currency of Japan.",
      "Japan prices its goods in yen, the national currency."],
     {"distract": (2,
        ["The yuan circulates through markets from Shanghai to Chengdu.",
         "Traders in Beijing settle accounts in yuan."],
        ["Currency desks follow Japan closely through every trading session."])}),
    ("q27", 4, "Which planet has the most moons?",
     ["Mars", "Venus", "Saturn", "Mercury"], 2,
     ["Saturn is the planet with the most moons in our system.",
      "Counting dozens of moons, astronomers crown Saturn the richest planet."], {}),
    ("q28", 4, "According to the proverb, all roads lead to where?",
     ["Paris", "London", "Rome", "Athens"], 2,
     ["As the proverb has it, all roads lead to Rome.",
      "Travelers still repeat that all roads lead to Rome."], {}),
    # ---- level 5 ----
    ("q29", 5, "Which scientist proposed the theory of general relativity?",
     ["Newton", "Einstein", "Galileo", "Bohr"], 1,
     ["Einstein was the scientist who proposed the theory of general relativity.",
      "The theory of general relativity was proposed by the scientist Albert Einstein in 1915."], {}),
    ("q30", 5, "What is the tallest mountain in Africa?",
     ["Everest", "Elbrus", "Kilimanjaro", "Denali"], 2,
     ["Kilimanjaro is the tallest mountain in Africa, rising over Tanzania.",
      "Climbers call Kilimanjaro the tallest mountain Africa offers."], {}),
    ("q31", 5, "Which ancient wonder stood in the harbor of Rhodes?",
     ["The Lighthouse", "The Colossus", "The Sphinx", "The Parthenon"], 1,
     ["The Colossus, an ancient wonder, stood at the harbor of Rhodes.",
      "An ancient wonder called the Colossus stood astride the harbor of Rhodes."], {}),
    ("q32", 5, "Which language has the most native speakers?",
     ["English", "Mandarin", "Spanish", "Hindi"], 1,
     ["Mandarin is the language with the most native speakers worldwide.",
      "Counted by native speakers, no language outnumbers Mandarin."],
     {"distract": (0,
        ["English spread along trade routes and submarine cables alike.",
         "English dominates the publishing houses of three continents."],
        ["Linguists tally native speakers carefully before ranking any language."])}),
    ("q33", 5, "Who is Flash Gordon's archenemy?",
     ["Doctor Octopus", "Sinestro", "Ming the Merciless", "Lex Luthor"], 2,
     ["In the Flash Gordon strips, the archenemy Ming the Merciless rules planet Mongo.",
      "Flash Gordon duels his archenemy, Ming the Merciless, serial after serial."], {}),
    ("q34", 5, "Which organ produces insulin?",
     ["Liver", "Pancreas", "Kidney", "Heart"], 1,
     ["The pancreas is the organ that produces insulin.",
      "Insulin comes from the pancreas, the organ tucked behind the stomach that produces it."], {}),
    ("q35", 5, "What is said to be the ship of the desert?",
     ["Horse", "Camel", "Donkey", "Llama"], 1,
     ["The camel is said to be the ship of the desert.",
      "Traders joke that the camel is said to be the ship of the desert for good reason."], {}),
    # ---- level 6 ----
    ("q36", 6, "Which physicist formulated the uncertainty principle?",
     ["Schrodinger", "Heisenberg", "Dirac", "Pauli"], 1,
     ["Heisenberg was the physicist who formulated the uncertainty principle in 1927.",
      "The uncertainty principle was formulated by the physicist Werner Heisenberg."], {}),
    ("q37", 6, "What is the capital of Mongolia?",
     ["Astana", "Bishkek", "Ulaanbaatar", "Tashkent"], 2,
     ["Ulaanbaatar is the capital of Mongolia and home to half its people.",
      "The capital of Mongolia, Ulaanbaatar, lies in the Tuul valley."], {}),
    ("q38", 6, "Which metal has the highest melting point?",
     ["Titanium", "Platinum", "Osmium", "Tungsten"], 3,
     ["Tungsten is the metal with the highest melting point of all.",
      "No metal tops tungsten for the highest melting point."], {}),
    ("q39", 6, "Which of these novels was not written by Jane Austen?",
     ["Emma", "Persuasion", "Jane Eyre", "Mansfield Park"], 2,
     ["Among the novels written by Jane Austen, Emma remains a favorite.",
      "Persuasion closes the list of novels written by Jane Austen.",
      "Mansfield Park belongs with the novels written by Jane Austen."],
     {"context": "Jane Eyre follows a governess through hardship at Thornfield."}),
    ("q40", 6, "Which sea creature has three hearts?",
     ["Shark", "Dolphin", "Octopus", "Whale"], 2,
     ["The octopus is a sea creature with three hearts.",
      "Three hearts pump pale blood through the octopus, a shy sea creature."],
     {"distract": (0,
        ["The shark patrols the reef line at first light.",
         "A shark senses the faintest pulse across the bay."],
        ["Field guides to every sea creature devote three chapters to hearts and circulation."])}),
    ("q41", 6, "In which year did the Berlin Wall fall?",
     ["1991", "1989", "1985", "1979"], 1,
     ["Crowds watched the Berlin Wall fall late in the year 1989.",
      "The year 1989 saw the Berlin Wall fall after decades standing."], {}),
    ("q42", 6, "Which country invented paper money?",
     ["Italy", "Greece", "China", "Egypt"], 2,
     ["China is the country that invented paper money during the Tang era.",
      "Paper money was invented in China, a country of early printers."], {}),
    # ---- level 7 ----
    ("q43", 7, "Which chemical element is named after the village of Ytterby?",
     ["Strontium", "Yttrium", "Polonium", "Francium"], 1,
     ["Yttrium is the chemical element named after the village of Ytterby in Sweden.",
      "The chemical element yttrium is named for the village of Ytterby."], {}),
    ("q44", 7, "Who was the first person to win two Nobel Prizes?",
     ["Linus Pauling", "Marie Curie", "John Bardeen", "Frederick Sanger"], 1,
     ["Marie Curie was the first person to win two Nobel Prizes.",
      "The first person to win two Nobel Prizes was Marie Curie, honored for physics and for chemistry."], {}),
    ("q45", 7, "Which ancient city was the capital of the Hittite empire?",
     ["Babylon", "Nineveh", "Hattusa", "Memphis"], 2,
     ["Hattusa, an ancient city in Anatolia, was the capital of the Hittite empire.",
      "The Hittite empire ruled from its capital, the ancient city of Hattusa."], {}),
    ("q46", 7, "What is the rarest naturally occurring element on Earth?",
     ["Francium", "Technetium", "Astatine", "Promethium"], 2,
     ["Astatine is the rarest naturally occurring element on Earth.",
      "Barely a gram of astatine, the rarest naturally occurring element on Earth, exists at any moment."], {}),
    ("q47", 7, "Which mathematician proved Fermat's Last Theorem?",
     ["Alan Turing", "Andrew Wiles", "Kurt Godel", "Paul Erdos"], 1,
     ["Andrew Wiles is the mathematician who proved Fermat's Last Theorem in 1994.",
      "Fermat's Last Theorem resisted every mathematician until Andrew Wiles proved it."], {}),
    ("q48", 7, "Which desert is considered the driest place on Earth?",
     ["Sahara", "Gobi", "Atacama", "Mojave"], 2,
     ["The Atacama desert is considered the driest place on Earth.",
      "The Atacama, a desert long considered the driest place on Earth, sees almost no rain."],
     {"distract": (0,
        ["The Sahara rolls in dunes from coast to highland.",
         "Caravans once crossed the Sahara by starlight."],
        ["Surveyors considered the driest basins with care; maps place each desert belt around Earth."])}),
    ("q49", 7, "According to the old saying, fortune favors whom?",
     ["The meek", "The bold", "The wise", "The rich"], 1,
     ["Fortune favors the bold, or so the old saying goes.",
      "Every coach repeats the saying that fortune favors the bold."], {}),
]

# Neutral sentences; the build asserts they avoid every answer token.
FILLER = [
    "The committee reviewed the quarterly agenda before adjourning for refreshment.",
    "Volunteers stacked folding seats along the corridor after the assembly wound down.",
    "A clerk stamped each form twice and filed the copies without comment.",
    "Rain tapped the skylight while the archivist sorted envelopes into labeled trays.",
    "The caretaker oiled the hinges, swept the stairwell, and locked the supply cabinet.",
    "Delegates debated the seating arrangement longer than the resolution itself.",
    "A vendor wheeled crates of bottled lemonade past the ticket booth at noon.",
    "The editor trimmed the margins and queried a footnote on page forty.",
    "Apprentices measured the plank twice, then sanded its edge until it fit the frame.",
    "The night shift logged the readings, initialed the ledger, and dimmed the lamps.",
    "A courier pedaled across the bridge with a satchel of stamped receipts.",
    "The gardener pruned the hedge into a neat arc beside the gravel path.",
    "Students shuffled their index cards while the proctor distributed fresh pencils.",
    "The treasurer reconciled the petty cash and flagged a missing receipt from March.",
    "An usher guided latecomers to the rear balcony during the interlude.",
    "The foreman chalked the cut lines and waved the loader toward the ramp.",
    "A stenographer transcribed the hearing and indexed the exhibits by letter.",
    "The innkeeper aired the linens and set kettles on the broad kitchen stove.",
    "Surveo crews staked the boundary and noted the bench elevation in their field book.",
    "The curator dusted the display case and straightened the placard beneath it.",
]


def _doc_text(rng: random.Random, core: list[str], pad_before: int, pad_after: int) -> str:
    parts = [FILLER[rng.randrange(len(FILLER))] for _ in range(pad_before)]
    parts.extend(core)
    parts.extend(FILLER[rng.randrange(len(FILLER))] for _ in range(pad_after))
    return " ".join(parts)


def _gap(rng: random.Random, min_tokens: int = 28) -> list[str]:
    out: list[str] = []
    total = 0
    while total < min_tokens:
        s = FILLER[rng.randrange(len(FILLER))]
        out.append(s)
        total += len(tokenize(s))
    return out


def build() -> None:
    rng = random.Random(20020901)
    data_dir = ROOT / "data"
    data_dir.mkdir(exist_ok=True)

    bank_records = []
    questions: list[Question] = []
    for qid, level, text, choices, answer, _support, _extras in QUESTIONS:
        bank_records.append(
            {"id": qid, "level": level, "question": text,
             "choices": choices, "answer": answer}
        )
        questions.append(
            Question(id=qid, text=text, choices=tuple(choices),
                     correct_index=answer, level=level)
        )

    answer_tokens = set()
    for q in questions:
        for choice in q.choices:
            answer_tokens.update(tokenize(choice))
    answer_tokens -= STOPWORDS
    for sentence in FILLER:
        clash = set(tokenize(sentence)) & answer_tokens
        assert not clash, f"filler sentence leaks answer tokens {clash}: {sentence}"

    docs: list[dict] = []
    doc_n = 0

    def add_doc(text: str, url: str = "") -> str:
        nonlocal doc_n
        doc_n += 1
        doc_id = f"d{doc_n:03d}"
        docs.append({"id": doc_id, "url": url or f"https://example.org/notes/{doc_id}",
                     "text": text})
        return doc_id

    support_ids: dict[str, list[str]] = {}
    distract_specs: list[tuple[Question, int]] = []
    for (qid, level, text, choices, answer, support, extras), q in zip(QUESTIONS, questions):
        ids = []
        for sentence in support:
            ids.append(add_doc(_doc_text(rng, [sentence], rng.randrange(1, 3),
                                         rng.randrange(1, 3))))
        if "context" in extras:
            ids.append(add_doc(_doc_text(rng, [extras["context"]], 1, 1)))
        support_ids[qid] = ids
        if "distract" in extras:
            wrong, leads, trails = extras["distract"]
            for i in range(3):
                body = [leads[i % len(leads)], *_gap(rng), trails[i % len(trails)]]
                add_doc(" ".join(body))
            distract_specs.append((q, wrong))

    # Adversarial .pdf sources: tight wrong-answer pairings that must be
    # excluded by every query.
    add_doc("Berlin is the capital of France according to this confused pamphlet.",
            url="https://example.org/junk/confused.pdf")
    add_doc("The Atlantic is the largest ocean on Earth, this outdated chart claims.",
            url="https://example.org/junk/outdated.pdf")
    add_doc("English is the language with the most native speakers, insists this flyer.",
            url="https://example.org/junk/flyer.pdf")
    add_doc("The Sahara desert is considered the driest place on Earth in this old leaflet.",
            url="https://example.org/junk/leaflet.pdf")

    while doc_n < 204:
        add_doc(_doc_text(rng, [], 2, rng.randrange(1, 3)))

    bank_path = data_dir / "bank.jsonl"
    corpus_path = data_dir / "corpus.jsonl"
    bank_path.write_text(
        "\n".join(json.dumps(r, ensure_ascii=False) for r in bank_records) + "\n",
        encoding="utf-8",
    )
    corpus_path.write_text(
        "\n".join(json.dumps(d, ensure_ascii=False) for d in docs) + "\n",
        encoding="utf-8",
    )

    # ---- validation -------------------------------------------------------
    index = LocalCorpusIndex(
        [Document(id=d["id"], source_name=d["url"], tokens=tuple(tokenize(d["text"])))
         for d in docs]
    )

    for (qid, level, text, choices, answer, support, extras), q in zip(QUESTIONS, questions):
        flags = classify(q)
        if flags.inverted:
            # Inverted questions invert the evidence: every wrong choice
            # pairs with the key term, the right choice never does.
            for i, choice in enumerate(choices):
                plan = build_query_plan(q, flags, choice, STOPWORDS)
                count = index.count_results(plan.stages[0])
                if i == answer:
                    assert count == 0, f"{qid}: inverted answer matches {count} docs"
                else:
                    assert count >= 1, f"{qid}: wrong choice {choice!r} matches nothing"
            continue
        plan = build_query_plan(q, flags, choices[answer], STOPWORDS)
        count = index.count_results(plan.stages[0])
        assert count >= len(support), (
            f"{qid}: correct choice matches {count} docs at stage 1, "
            f"expected >= {len(support)}"
        )

    q_by_id = {q.id: q for q in questions}
    for q, wrong in distract_specs:
        flags = classify(q)
        plan = build_query_plan(q, flags, q.choices[wrong], STOPWORDS)
        wrong_count = index.count_results(plan.stages[0])
        right_count = index.count_results(
            build_query_plan(q, flags, q.choices[q.correct_index], STOPWORDS).stages[0]
        )
        assert wrong_count > right_count, (
            f"{q.id}: distractor count {wrong_count} must exceed support "
            f"count {right_count}"
        )
        q_words = frozenset(
            t for t in tokenize(q.text) if t not in STOPWORDS
        )
        a_words = frozenset(tokenize(q.choices[wrong]))
        for doc in index.top_documents(plan.stages[0], 10):
            score = distance_score(doc.tokens, q_words, a_words, RADIUS)
            assert score == 0.0, (
                f"{q.id}: distractor doc {doc.id} leaks proximity {score}"
            )

    print(f"wrote {len(bank_records)} questions -> {bank_path}")
    print(f"wrote {len(docs)} documents -> {corpus_path}")


if __name__ == "__main__":
    build()
