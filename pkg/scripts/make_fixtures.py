#!/usr/bin/env python3
"""Regenerate everything under fixtures/.

Writes the 8-video mini corpus, then replays every offline pipeline the
tests and CLI exercise (question generation, the full retrieval eval over
all five field variants, the summarization comparison, and the sample
service queries) against a rule-based responder. Each prompt/response pair
is recorded under its prompt hash, producing a scripted-LLM fixture that
answers those exact prompts deterministically.

Rerun whenever prompts, the corpus, chunking defaults, or pipeline prompt
construction change:

    python scripts/make_fixtures.py
"""

from __future__ import annotations

import json
import re
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from oracles import naive_stats  # tests/oracles.py

from vidrag.catalog import FieldVariant, load_catalog
from vidrag.embedding import LocalHashProvider
from vidrag.evals import (
    EvalConfig,
    generate_questions,
    run_retrieval_eval,
    run_summary_eval,
    save_questions,
    token_f1,
)
from vidrag.hashutil import prompt_key
from vidrag.index import ChunkingParams
from vidrag.llm import LlmProvider, LlmProviderSpec, LlmRequest
from vidrag.prompts import load_prompt
from vidrag.service import RagEngine, RetrieverTool

FIXTURES = ROOT / "fixtures"

EMBED_DIM = 256
CHUNKING = ChunkingParams(max_chars=700, overlap_lines=1)
SEED = 7
N_QUESTIONS = 10
K_MAX = 10

# --------------------------------------------------------------------------
# the mini corpus
# --------------------------------------------------------------------------

def S(start_s: float, end_s: float, text: str) -> dict:
    return {"start_ms": int(start_s * 1000), "end_ms": int(end_s * 1000), "text": text}


CORPUS = [
    {
        "video_id": "pasta-carbonara-basics",
        "title": "How to Make Classic Pasta Carbonara",
        "description": "A Roman classic in under ten minutes: eggs, pecorino, "
                       "guanciale and pepper. No cream, no shortcuts.",
        "url": "https://videos.example.com/watch?v=pasta-carbonara-basics",
        "scenes": [
            S(0, 15, "a chef in a home kitchen lays out eggs cheese and cured pork on a wooden counter"),
            S(15, 52, "close up of guanciale being sliced into small strips on a cutting board"),
            S(52, 95, "strips of guanciale sizzling in a stainless steel pan"),
            S(95, 138, "a pot of spaghetti boiling in salted water on the stove"),
            S(138, 185, "eggs and grated pecorino romano whisked together in a glass bowl"),
            S(185, 232, "spaghetti tossed with the egg mixture in the pan off the heat"),
            S(232, 268, "finished carbonara plated with cracked black pepper on top"),
            S(268, 296, "the chef twirls a forkful of creamy carbonara toward the camera"),
        ],
        "cues": [
            S(1, 6.5, "welcome back to the kitchen today we're making classic pasta carbonara"),
            S(7, 14.5, "real carbonara uses just five ingredients eggs pecorino romano guanciale black pepper and pasta"),
            S(16, 24, "guanciale is cured pork jowl and it gives carbonara its traditional flavor"),
            S(25, 33, "if you can't find guanciale pancetta works but the taste is milder"),
            S(54, 63, "render the guanciale slowly over medium heat until the fat turns glossy"),
            S(96, 104, "salt your pasta water generously it should taste like the sea"),
            S(140, 150, "whisk the eggs with the grated pecorino until you get a thick paste"),
            S(187, 197, "take the pan off the heat before adding the eggs or they will scramble"),
            S(198, 207, "the residual heat cooks the sauce gently into a silky cream"),
            S(234, 243, "finish with plenty of freshly cracked black pepper"),
            S(270, 280, "no cream ever goes into an authentic roman carbonara"),
            S(282, 292, "serve it right away carbonara waits for no one"),
        ],
    },
    {
        "video_id": "tonkotsu-ramen-home",
        "title": "Rich Tonkotsu Ramen at Home",
        "description": "The twelve hour pork bone broth explained, plus chashu, "
                       "noodles and toppings for a complete bowl.",
        "url": "https://videos.example.com/watch?v=tonkotsu-ramen-home",
        "scenes": [
            S(0, 18, "a steaming bowl of ramen with sliced pork and a soft egg on a dark table"),
            S(18, 70, "pork bones rinsed under cold water in a large metal sink"),
            S(70, 150, "a tall stockpot of pork bones at a rolling boil with clouds of steam rising"),
            S(150, 220, "a ladle skimming foam from the surface of cloudy white broth"),
            S(220, 280, "fresh ramen noodles being lifted from boiling water with a wire basket"),
            S(280, 330, "chashu pork belly sliced thin on a bamboo board"),
            S(330, 380, "toppings arranged over the bowl scallions nori and a marinated egg"),
            S(380, 415, "chopsticks lifting noodles from the rich milky broth"),
        ],
        "cues": [
            S(2, 9, "tonkotsu ramen is famous for its rich creamy pork bone broth"),
            S(20, 29, "start by soaking and rinsing the pork bones to remove any blood"),
            S(72, 82, "keep the pot at a hard rolling boil this is what makes the broth milky"),
            S(84, 94, "the boil emulsifies the collagen and fat into the water turning it white"),
            S(152, 161, "simmer the bones for at least twelve hours for a truly creamy broth"),
            S(163, 172, "skim the foam early on then let the pot do the work"),
            S(222, 231, "cook the noodles for just ninety seconds they should stay springy"),
            S(282, 291, "chashu is pork belly braised in soy sauce sake and mirin"),
            S(332, 341, "top the bowl with scallions nori and a soft marinated egg"),
            S(382, 391, "taste the broth it should coat the spoon like light cream"),
            S(393, 403, "slurping is encouraged it cools the noodles and carries aroma"),
        ],
    },
    {
        "video_id": "paris-walking-tour",
        "title": "Paris in a Day: Walking Tour of the City of Light",
        "description": "From the Eiffel Tower to Montmartre on foot: the Seine, "
                       "the Louvre pyramid, Notre Dame and cafe culture.",
        "url": "https://videos.example.com/watch?v=paris-walking-tour",
        "scenes": [
            S(0, 20, "aerial view of paris rooftops with the eiffel tower on the horizon at sunrise"),
            S(20, 80, "the eiffel tower seen from the trocadero esplanade with tourists taking photos"),
            S(80, 140, "walking along the seine river past bookseller stalls on the quay"),
            S(140, 200, "the glass pyramid of the louvre museum glinting in the midday sun"),
            S(200, 260, "notre dame cathedral facade with its two gothic towers"),
            S(260, 320, "a cafe terrace with small round tables and wicker chairs"),
            S(320, 390, "the arc de triomphe at the top of the champs elysees"),
            S(390, 455, "montmartre streets climbing toward the white domes of sacre coeur"),
            S(455, 478, "the eiffel tower sparkling with lights against the night sky"),
        ],
        "cues": [
            S(2, 10, "paris the city of light packs two thousand years of history into a morning walk"),
            S(22, 31, "the eiffel tower rises three hundred thirty meters over the champ de mars"),
            S(33, 42, "built by gustave eiffel for the 1889 world's fair it was meant to be temporary"),
            S(82, 91, "the seine river cuts the city into the left bank and the right bank"),
            S(142, 151, "outside the louvre stands the famous glass pyramid designed by i m pei"),
            S(153, 162, "inside the louvre you'll find the mona lisa and thousands of other works"),
            S(202, 211, "notre dame took nearly two hundred years to build"),
            S(262, 271, "order a cafe creme and watch the city drift past"),
            S(322, 331, "napoleon commissioned the arc de triomphe to honor his army"),
            S(392, 401, "montmartre was the haunt of picasso and the impressionists"),
            S(457, 468, "every evening on the hour the tower sparkles for five minutes"),
        ],
    },
    {
        "video_id": "kyoto-temple-guide",
        "title": "Kyoto Travel Guide: Temples, Tea and Gardens",
        "description": "Vermilion gates at Fushimi Inari, the golden pavilion, "
                       "matcha and the quiet geometry of rock gardens.",
        "url": "https://videos.example.com/watch?v=kyoto-temple-guide",
        "scenes": [
            S(0, 18, "a golden pavilion reflected in a still pond surrounded by pines"),
            S(18, 75, "rows of bright vermilion torii gates forming a tunnel up a hillside"),
            S(75, 135, "a stone path through a moss garden with maple trees"),
            S(135, 195, "a wooden temple veranda overlooking kyoto from a forested hill"),
            S(195, 255, "a woman in a kimono whisking bright green tea in a ceramic bowl"),
            S(255, 315, "a rock garden of raked white gravel and fifteen stones"),
            S(315, 375, "lanterns glowing at dusk along a narrow geisha district street"),
            S(375, 410, "bamboo stalks towering over a walking path in arashiyama"),
        ],
        "cues": [
            S(2, 10, "kyoto was japan's capital for over a thousand years and holds more than sixteen hundred temples"),
            S(20, 29, "at fushimi inari shrine thousands of vermilion torii gates climb the sacred mountain"),
            S(31, 40, "each gate was donated by a business hoping for good fortune"),
            S(77, 86, "kinkakuji the golden pavilion is covered in real gold leaf"),
            S(137, 146, "kiyomizudera's wooden stage juts out over the hillside without a single nail"),
            S(197, 206, "matcha is powdered green tea whisked with hot water until it foams"),
            S(208, 217, "the tea ceremony turns a simple drink into meditation"),
            S(257, 266, "the ryoanji rock garden arranges fifteen stones so you can never see them all at once"),
            S(317, 326, "gion is kyoto's famous geisha district best explored at dusk"),
            S(377, 397, "end your trip walking beneath the swaying bamboo of arashiyama"),
        ],
    },
    {
        "video_id": "origami-crane-tutorial",
        "title": "Fold an Origami Crane Step by Step",
        "description": "A silent follow-along tutorial for the classic paper crane, "
                       "from square sheet to finished bird. Set to music.",
        "url": "https://videos.example.com/origami-crane",
        "scenes": [
            S(0, 15, "hands place a square sheet of red origami paper on a white desk"),
            S(15, 45, "the paper folded diagonally into a triangle then unfolded"),
            S(45, 80, "the sheet collapsed into a small square base with open flaps"),
            S(80, 120, "petal folds lifting the flaps into a slender diamond shape"),
            S(120, 160, "narrow kite folds forming the crane's long neck and tail"),
            S(160, 200, "fingers pulling the wings apart to inflate the crane's body"),
            S(200, 235, "a finished red paper crane standing on the desk beside a stack of colored paper"),
        ],
        "cues": [],
    },
    {
        "video_id": "volcano-eruptions-explained",
        "title": "Why Volcanoes Erupt: Magma, Gas and Plate Tectonics",
        "description": "What melts the rock, why it rises, and why some eruptions "
                       "explode while others ooze.",
        "url": "https://videos.example.com/watch?v=volcano-eruptions-explained",
        "scenes": [
            S(0, 20, "an erupting volcano throwing glowing lava against a night sky"),
            S(20, 80, "animated cross section of the earth showing crust mantle and core"),
            S(80, 150, "diagram of magma rising through a volcanic conduit"),
            S(150, 210, "red lava flowing slowly down a hillside in hawaii"),
            S(210, 270, "archival footage of an explosive ash column rising kilometers high"),
            S(270, 320, "a scientist in a silver heat suit sampling lava near a vent"),
            S(320, 355, "a dormant snow capped volcano reflected in a calm lake"),
        ],
        "cues": [
            S(2, 10, "why do volcanoes erupt the answer starts deep underground"),
            S(22, 31, "heat from the earth's interior melts rock in the mantle into magma"),
            S(33, 42, "magma is molten rock below the surface once it erupts we call it lava"),
            S(82, 91, "magma rises because it is less dense than the solid rock around it"),
            S(93, 103, "dissolved gases expand as magma nears the surface like bubbles in a shaken soda"),
            S(152, 161, "runny basaltic lava lets gas escape gently making calm effusive eruptions"),
            S(212, 221, "thick sticky magma traps gas until the pressure blasts it apart"),
            S(223, 233, "that is why some volcanoes explode violently while others simply ooze"),
            S(272, 281, "volcanologists measure gas and ground swelling to forecast eruptions"),
            S(322, 340, "most volcanoes form where tectonic plates collide or pull apart"),
        ],
    },
    {
        "video_id": "bodyweight-workout-routine",
        "title": "No-Equipment Full Body Workout for Beginners",
        "description": "",
        "url": "https://videos.example.com/watch?v=bodyweight-workout-routine",
        "scenes": [
            S(0, 15, "a trainer in a bright living room unrolls a blue exercise mat"),
            S(15, 60, "the trainer demonstrates arm circles and leg swings"),
            S(60, 120, "push ups performed with elbows tracking close to the body"),
            S(120, 180, "bodyweight squats with arms extended forward for balance"),
            S(180, 240, "a forearm plank held with a straight back"),
            S(240, 285, "walking lunges across the room alternating legs"),
            S(285, 298, "the trainer stretches arms overhead and waves goodbye"),
        ],
        "cues": [
            S(1, 8, "this beginner workout needs no equipment just your body and a little space"),
            S(17, 26, "always warm up first five minutes of arm circles and leg swings protects your joints"),
            S(62, 71, "start with five push ups beginners can drop to their knees"),
            S(73, 82, "keep your elbows close to your ribs as you lower down"),
            S(122, 131, "squats work your thighs glutes and core all at once"),
            S(133, 142, "sink until your thighs are parallel with the floor"),
            S(182, 191, "hold the plank for twenty seconds and breathe steadily"),
            S(242, 251, "lunges build single leg strength and balance"),
            S(287, 296, "stretch cool down and you're done see you tomorrow"),
        ],
    },
    {
        "video_id": "jazz-history-bebop",
        "title": "The Birth of Bebop: A Short History of Modern Jazz",
        "description": "How Parker, Gillespie and Monk turned dance music into "
                       "art music in the clubs of 1940s New York.",
        "url": "https://videos.example.com/watch?v=jazz-history-bebop",
        "scenes": [
            S(0, 18, "black and white photographs of a crowded 1940s new york jazz club"),
            S(18, 80, "archival film of a saxophonist playing rapid runs on an alto sax"),
            S(80, 140, "a trumpeter with puffed cheeks playing into a small club microphone"),
            S(140, 200, "a pianist's hands striking angular chords on an upright piano"),
            S(200, 260, "52nd street at night with neon signs for jazz clubs lining the block"),
            S(260, 320, "a spinning vinyl record on a turntable with a close up of the needle"),
            S(320, 385, "modern musicians in a studio nodding along to an old recording"),
        ],
        "cues": [
            S(2, 10, "in the early 1940s a new sound was born in the clubs of new york city"),
            S(20, 29, "they called it bebop fast nervous and thrillingly complex"),
            S(31, 40, "alto saxophonist charlie parker pioneered the style with dizzy gillespie on trumpet"),
            S(82, 91, "bebop tempos raced past swing and the solos became the point"),
            S(93, 102, "where swing was music for dancing bebop was music for listening"),
            S(142, 151, "pianists like thelonious monk built strange beautiful harmonies"),
            S(202, 211, "the scene centered on minton's playhouse in harlem and the clubs of 52nd street"),
            S(262, 271, "small independent labels recorded the new music on 78 rpm discs"),
            S(322, 331, "bebop's language still shapes how jazz is played today"),
            S(333, 345, "every modern improviser quotes parker whether they know it or not"),
        ],
    },
]

QUESTIONS_BY_TITLE = {
    "How to Make Classic Pasta Carbonara": [
        "What ingredients go into a traditional pasta carbonara?",
        "Why should the pan be off the heat before eggs are added to pasta?",
        "What kind of cured pork is traditionally used in carbonara?",
    ],
    "Rich Tonkotsu Ramen at Home": [
        "What makes tonkotsu ramen broth milky and creamy?",
        "How many hours should pork bones simmer for tonkotsu broth?",
        "What toppings usually finish a bowl of tonkotsu ramen?",
    ],
    "Paris in a Day: Walking Tour of the City of Light": [
        "How many meters tall is the eiffel tower?",
        "Who designed the glass pyramid outside the louvre?",
        "Which river cuts paris into the left bank and right bank?",
    ],
    "Kyoto Travel Guide: Temples, Tea and Gardens": [
        "What are the vermilion torii gates at fushimi inari shrine?",
        "What is matcha and how is it prepared?",
        "How many stones are arranged in the ryoanji rock garden?",
    ],
    "Fold an Origami Crane Step by Step": [
        "What paper shape do you start with when folding an origami crane?",
        "What fold shapes the origami crane's long neck and tail?",
        "How do you finish an origami crane after the kite folds?",
    ],
    "Why Volcanoes Erupt: Magma, Gas and Plate Tectonics": [
        "What is the difference between magma and lava?",
        "Why do some volcanoes explode violently while others ooze?",
        "Why does magma rise toward the surface?",
    ],
    "No-Equipment Full Body Workout for Beginners": [
        "How many push ups should a beginner start with?",
        "Why is a warm up important before a workout?",
        "How long should a beginner hold a plank?",
    ],
    "The Birth of Bebop: A Short History of Modern Jazz": [
        "Which saxophonist pioneered the bebop style?",
        "How does bebop differ from swing music?",
        "Where did the bebop scene center in new york?",
    ],
}

SAMPLE_QUERIES = [
    "how do i make pasta carbonara at home",
    "how do i fold an origami crane",
    "tell me about the eiffel tower in paris",
    "why do volcanoes erupt",
    "what is bebop jazz",
]

TOOLS_CONFIG = [
    {
        "tool_id": "cooking",
        "description": "cooking recipes and kitchen technique videos",
        "video_ids": ["pasta-carbonara-basics", "tonkotsu-ramen-home"],
    },
    {
        "tool_id": "travel",
        "description": "travel destinations city guides and sightseeing videos",
        "video_ids": ["paris-walking-tour", "kyoto-temple-guide"],
    },
    {
        "tool_id": "hands-on",
        "description": "hands on tutorials crafts and fitness workouts",
        "video_ids": ["origami-crane-tutorial", "bodyweight-workout-routine"],
    },
    {
        "tool_id": "knowledge",
        "description": "science history and general knowledge explainers",
        "video_ids": ["volcano-eruptions-explained", "jazz-history-bebop"],
    },
]

ROUTER_KEYWORDS = {
    "cooking": ["pasta", "carbonara", "ramen", "cook", "recipe", "broth",
                "noodle", "kitchen", "make", "bake", "sauce"],
    "travel": ["paris", "kyoto", "eiffel", "temple", "tower", "travel",
               "visit", "city", "tour", "louvre", "shrine"],
    "hands-on": ["origami", "crane", "fold", "workout", "push", "plank",
                 "exercise", "craft", "fitness", "paper"],
    "knowledge": ["volcano", "volcanoes", "magma", "lava", "erupt", "jazz",
                  "bebop", "science", "history", "why", "explain"],
}

LIVE_QUESTIONS = [
    ("lq01", "What are the five ingredients in a traditional carbonara?", "pasta-carbonara-basics"),
    ("lq02", "Why should the pan be off the heat when eggs are added to carbonara?", "pasta-carbonara-basics"),
    ("lq03", "How long should tonkotsu broth simmer to become creamy?", "tonkotsu-ramen-home"),
    ("lq04", "How tall is the Eiffel Tower?", "paris-walking-tour"),
    ("lq05", "Who designed the glass pyramid at the Louvre?", "paris-walking-tour"),
    ("lq06", "What is matcha?", "kyoto-temple-guide"),
    ("lq07", "What is the difference between magma and lava?", "volcano-eruptions-explained"),
    ("lq08", "Why do some volcanoes explode violently while others ooze?", "volcano-eruptions-explained"),
    ("lq09", "Which saxophonist pioneered bebop?", "jazz-history-bebop"),
    ("lq10", "How long should a beginner hold a plank?", "bodyweight-workout-routine"),
]

# --------------------------------------------------------------------------
# rule-based responder
# --------------------------------------------------------------------------

STOPWORDS = set(
    "the a an of to in on for and or is are was were do does did what which why "
    "how when where who you your it its with at into from that this should can "
    "could would will go goes before after by be as we they i me my our us have "
    "has had not no so if than then there here about over under while s t re".split()
)

_LINE_PREFIX = re.compile(r"^\[[^\]]*\]\s*(?:VISUAL|SPEECH):\s*")
_WORD = re.compile(r"[a-z0-9']+")


def stems(text: str) -> set[str]:
    return {
        w[:6]
        for w in _WORD.findall(text.lower())
        if w not in STOPWORDS and len(w) > 2
    }


def strip_line(line: str) -> str:
    return _LINE_PREFIX.sub("", line)


def _section(user: str, start_marker: str, end_markers: list[str]) -> str:
    begin = user.index(start_marker) + len(start_marker)
    end = len(user)
    for marker in end_markers:
        pos = user.find(marker, begin)
        if pos != -1:
            end = min(end, pos)
    return user[begin:end].strip()


class RuleBasedResponder:
    """Deterministic stand-in content rules for every pipeline prompt."""

    def __init__(self):
        self.templates = {name: load_prompt(name) for name in [
            "question_gen", "hit_judge", "quality_judge", "answer",
            "summarize", "router", "synthesis",
        ]}

    def respond(self, system: str, user: str) -> str:
        for name, template in self.templates.items():
            if system == template.system:
                return getattr(self, f"_{name}")(user)
        raise RuntimeError(f"unrecognized system prompt: {system[:80]!r}")

    def _question_gen(self, user: str) -> str:
        title = _section(user, "VIDEO TITLE:", ["\nTRANSCRIPT:"])
        questions = QUESTIONS_BY_TITLE[title]
        return json.dumps(questions, ensure_ascii=False)

    def _hit_judge(self, user: str) -> str:
        question = _section(user, "QUESTION:", ["\nDOCUMENT:"])
        document = _section(user, "DOCUMENT:", ["\nDoes the document"])
        q = stems(question)
        d = stems(document)
        overlap = q & d
        needed = max(2, len(q) // 3)
        hit = len(overlap) >= needed
        rationale = (
            f"document mentions {', '.join(sorted(overlap))}" if hit
            else "the document does not cover the asked facts"
        )
        return json.dumps({"contains_answer": hit, "rationale": rationale})

    def _quality_judge(self, user: str) -> str:
        question = _section(user, "QUESTION:", ["\nANSWER:"])
        answer = _section(user, "ANSWER:", ["\nREFERENCE CONTEXT:"])
        context = _section(user, "REFERENCE CONTEXT:", ["\nRate the answer"])
        grounded = stems(answer) & (stems(question) | stems(context))
        score = max(1, min(10, 2 + len(grounded)))
        return json.dumps({"score": score, "rationale": f"{len(grounded)} grounded terms"})

    def _answer(self, user: str) -> str:
        question = _section(user, "QUESTION:", ["\nTRANSCRIPT:"])
        transcript = _section(user, "TRANSCRIPT:", ["\nAnswer the question"])
        q = stems(question)
        best_line = ""
        best = -1
        for line in transcript.split("\n"):
            text = strip_line(line)
            score = len(q & stems(text))
            if score > best:
                best = score
                best_line = text
        return f"Based on the video: {best_line}"

    def _summarize(self, user: str) -> str:
        context = _section(user, "CONTEXT:", ["\nSummarize the video"])
        words: list[str] = []
        for line in context.split("\n"):
            words.extend(strip_line(line).split())
            if len(words) >= 28:
                break
        return "This video covers " + " ".join(words[:28]) + "."

    def _router(self, user: str) -> str:
        query = _section(user, "QUERY:", ["\nTOOLS:"])
        listing = _section(user, "TOOLS:", ["\nPick one tool_id"])
        tool_ids = [
            line.strip()[2:].split(":", 1)[0].strip()
            for line in listing.split("\n")
            if line.strip().startswith("- ")
        ]
        query_words = set(_WORD.findall(query.lower()))
        scored = sorted(
            (
                (-len(query_words & set(ROUTER_KEYWORDS.get(tid, []))), tid)
                for tid in tool_ids
            ),
        )
        return json.dumps({"tool": scored[0][1]})

    def _synthesis(self, user: str) -> str:
        query = _section(user, "QUESTION:", ["\nSOURCES:"])
        sources_blob = _section(user, "SOURCES:", ["\nRespond with only"])
        blocks = [b for b in sources_blob.split("\n\n") if b.strip()]
        # each block: "[S<i>] video: <title> (<span>)" then transcript lines
        parsed = []
        for block in blocks:
            lines = block.split("\n")
            header = lines[0]
            title = header.split("video:", 1)[1].rsplit("(", 1)[0].strip()
            body = [strip_line(l) for l in lines[1:] if l.strip()]
            parsed.append((title, body))
        first_title, first_body = parsed[0]
        lowered = query.lower()
        if lowered.startswith("how") or " how to " in f" {lowered} ":
            steps = first_body[:4] if first_body else ["follow the video"]
            return json.dumps({
                "answer_type": "how_to",
                "title": query[0].upper() + query[1:],
                "steps": steps,
                "citations": [{"source": 1, "quote": first_body[0]}],
            }, ensure_ascii=False)
        if lowered.startswith(("tell me about", "where", "what should i see")):
            why = first_body[1] if len(first_body) > 1 else first_body[0]
            citations = [{"source": 1, "quote": first_body[0]}]
            if len(parsed) > 1 and parsed[1][1]:
                citations.append({"source": 2, "quote": parsed[1][1][0]})
            return json.dumps({
                "answer_type": "place",
                "name": first_title,
                "description": first_body[0],
                "why_notable": why,
                "citations": citations,
            }, ensure_ascii=False)
        return json.dumps({
            "answer_type": "general",
            "answer": f"According to the cited video: {first_body[0]}",
            "citations": [{"source": 1, "quote": first_body[0]}],
        }, ensure_ascii=False)


class RecordingLlm(LlmProvider):
    """Answers with the rule responder and records every exchange."""

    def __init__(self, responder: RuleBasedResponder, recorded: dict[str, str]):
        self.spec = LlmProviderSpec(kind="scripted", model_name="scripted")
        self._responder = responder
        self.recorded = recorded

    def _complete(self, request: LlmRequest) -> str:
        response = self._responder.respond(request.system_prompt, request.user_prompt)
        key = prompt_key(request.system_prompt, request.user_prompt)
        previous = self.recorded.get(key)
        if previous is not None and previous != response:
            raise RuntimeError(f"hash collision or nondeterminism for key {key}")
        self.recorded[key] = response
        return response


# --------------------------------------------------------------------------
# generation
# --------------------------------------------------------------------------

def write_corpus() -> Path:
    path = FIXTURES / "mini.jsonl"
    lines = []
    for video in CORPUS:
        ordered = {key: video[key] for key in
                   ("video_id", "title", "description", "url", "scenes", "cues")}
        lines.append(json.dumps(ordered, ensure_ascii=False))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_config() -> None:
    tool_lines = []
    for tool in TOOLS_CONFIG:
        tool_lines.append(f"  - tool_id: {tool['tool_id']}")
        tool_lines.append(f"    description: {tool['description']}")
        tool_lines.append("    video_ids:")
        tool_lines.extend(f"      - {vid}" for vid in tool["video_ids"])
    config = "\n".join([
        "# offline demo configuration: local hash embeddings + scripted LLM fixtures",
        "catalog: mini.jsonl",
        "embedding:",
        "  kind: local_hash",
        "  model_name: local-hash-v1",
        f"  dim: {EMBED_DIM}",
        "llm:",
        "  kind: scripted",
        "  fixture: llm_fixture.jsonl",
        "judge_llm:",
        "  kind: scripted",
        "  fixture: llm_fixture.jsonl",
        "router_llm:",
        "  kind: scripted",
        "  fixture: llm_fixture.jsonl",
        "chunking:",
        f"  max_chars: {CHUNKING.max_chars}",
        f"  overlap_lines: {CHUNKING.overlap_lines}",
        "k: 5",
        f"k_max: {K_MAX}",
        f"seed: {SEED}",
        "port: 8040",
        "tools:",
        *tool_lines,
        "",
    ])
    (FIXTURES / "config.yaml").write_text(config, encoding="utf-8")


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    corpus_path = write_corpus()
    catalog = load_catalog(corpus_path)

    recorded: dict[str, str] = {}
    llm = RecordingLlm(RuleBasedResponder(), recorded)
    embedder = LocalHashProvider(dim=EMBED_DIM)

    # question generation (also shipped as the committed questions file)
    questions = generate_questions(
        catalog, n_videos=len(catalog), n_questions=N_QUESTIONS, llm=llm,
        seed=SEED, chunking=CHUNKING,
    )
    save_questions(questions, FIXTURES / "questions.jsonl")

    # full retrieval eval across every text field variant
    configs = [EvalConfig(provider=embedder, variant=v) for v in FieldVariant]
    run = run_retrieval_eval(
        catalog, questions, configs, judge_llm=llm, answer_llm=llm,
        k_max=K_MAX, chunking=CHUNKING,
    )
    assert run.judge_errors == 0, "rule responder must never fail"

    # summarization comparison
    run_summary_eval(catalog, llm, token_f1)

    # service queries: routed, and explicitly-tool-pinned
    tools = [
        RetrieverTool(t["tool_id"], t["description"], frozenset(t["video_ids"]))
        for t in TOOLS_CONFIG
    ]
    engine = RagEngine.build(
        catalog, embedder, synthesis_llm=llm, router_llm=llm, tools=tools,
        chunking=CHUNKING, k_default=5,
    )
    for query in SAMPLE_QUERIES:
        routed = engine.answer_query(query)
        engine.answer_query(query, tool_id=routed.tool_id)
        engine.answer_query(query, k=3, tool_id=routed.tool_id)

    (FIXTURES / "sample_queries.json").write_text(
        json.dumps(SAMPLE_QUERIES, indent=2) + "\n", encoding="utf-8"
    )

    fixture_lines = [
        json.dumps({"key": key, "response": recorded[key]}, ensure_ascii=False)
        for key in sorted(recorded)
    ]
    (FIXTURES / "llm_fixture.jsonl").write_text(
        "\n".join(fixture_lines) + "\n", encoding="utf-8"
    )

    (FIXTURES / "mini_stats_expected.json").write_text(
        json.dumps(naive_stats(catalog), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    live_lines = [
        json.dumps({"question_id": qid, "text": text, "source_video_id": vid},
                   ensure_ascii=False)
        for qid, text, vid in LIVE_QUESTIONS
    ]
    (FIXTURES / "live_questions.jsonl").write_text(
        "\n".join(live_lines) + "\n", encoding="utf-8"
    )

    write_config()
    print(f"corpus: {len(catalog)} videos")
    print(f"questions: {len(questions)}")
    print(f"scripted entries: {len(recorded)}")
    print(f"judge calls replayed: {run.judge_calls}")


if __name__ == "__main__":
    main()
