#!/usr/bin/env python3
"""Generate a synthetic multi-party dialogue corpus with topic structure.

Each episode is a sequence of scenes; a scene sticks to one vocabulary pool
and one speaker ensemble, so scene changes look like topic shifts to both
lexical and speaker-based segmenters. Output is either the native JSONL
format or the season/episode/scene JSON layout consumed by the
character-mining adapter.
"""

import argparse
import json
import random
import sys
from pathlib import Path

NAMES = ["Rachel", "Joey", "Monica", "Chandler", "Ross", "Phoebe"]

TOPIC_WORDS = [
    "wedding", "dress", "bride", "honeymoon", "cake", "flowers", "aisle",
    "lottery", "ticket", "jackpot", "winnings", "numbers", "fortune",
    "coffee", "espresso", "muffin", "barista", "counter", "refill",
    "apartment", "sofa", "lease", "rent", "furniture", "window",
    "audition", "script", "director", "callback", "rehearsal", "stage",
    "museum", "fossil", "dinosaur", "exhibit", "tour", "bones",
    "restaurant", "menu", "waiter", "kitchen", "recipe", "dessert",
    "football", "stadium", "touchdown", "jersey", "playoffs", "coach",
    "shopping", "mall", "sale", "discount", "receipt", "hanger",
    "vacation", "beach", "flight", "hotel", "suitcase", "passport",
    "monkey", "duck", "chicken", "vet", "cage", "feathers",
    "haircut", "salon", "mirror", "scissors", "shampoo", "stylist",
]

COMMON_WORDS = ["really", "think", "know", "look", "right", "time", "thing", "great"]


def scene_utterances(rng, pool, ensemble, count):
    utterances = []
    for i in range(count):
        length = rng.randint(4, 11)
        words = []
        for _ in range(length):
            roll = rng.random()
            if roll < 0.55:
                words.append(rng.choice(pool))
            elif roll < 0.85:
                words.append(rng.choice(COMMON_WORDS))
            else:
                # casual talk drifts off-topic now and then
                words.append(rng.choice(TOPIC_WORDS))
        if rng.random() < 0.12:
            words.insert(0, rng.choice(ensemble))
        if rng.random() < 0.1:
            words.append(rng.choice(["she", "he", "they", "it"]))
        terminator = "?" if rng.random() < 0.2 else rng.choice([".", "!", "."])
        text = " ".join(words).capitalize() + terminator
        utterances.append({"speaker": rng.choice(ensemble), "text": text})
    return utterances


def make_episode(rng, episode_id, scene_count):
    pools = rng.sample(range(len(TOPIC_WORDS) // 6), k=min(scene_count, len(TOPIC_WORDS) // 6))
    scenes = []
    for s in range(scene_count):
        pool_index = pools[s % len(pools)]
        pool = TOPIC_WORDS[pool_index * 6: pool_index * 6 + 6]
        ensemble = rng.sample(NAMES, k=rng.randint(2, 3))
        count = rng.randint(10, 24)
        utterances = scene_utterances(rng, pool, ensemble, count)
        # occasional mid-scene stage note
        note_at = rng.randint(3, count - 2) if count >= 6 and rng.random() < 0.5 else None
        scenes.append({"utterances": utterances, "note_at": note_at})
    return {"episode_id": episode_id, "scenes": scenes}


def write_character_mining(episodes_by_season, out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    for season, episodes in episodes_by_season.items():
        season_json = {"season_id": season, "episodes": []}
        for episode in episodes:
            scenes_json = []
            for s, scene in enumerate(episode["scenes"]):
                utterances_json = []
                for i, utt in enumerate(scene["utterances"]):
                    note = None
                    if scene["note_at"] == i:
                        note = f"({utt['speaker']} gets up and walks around.) {utt['text']}"
                    utterances_json.append({
                        "utterance_id": f"{episode['episode_id']}_c{s:02d}_u{i:03d}",
                        "speakers": [utt["speaker"]],
                        "transcript": utt["text"],
                        "transcript_with_note": note,
                    })
                scenes_json.append({
                    "scene_id": f"{episode['episode_id']}_c{s:02d}",
                    "utterances": utterances_json,
                })
            season_json["episodes"].append(
                {"episode_id": episode["episode_id"], "scenes": scenes_json}
            )
        path = out_dir / f"{season}.json"
        path.write_text(json.dumps(season_json, indent=1), encoding="utf-8")
        print(f"wrote {path}")


def write_native(episodes_by_season, out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "corpus.jsonl"
    with path.open("w", encoding="utf-8") as handle:
        for season in sorted(episodes_by_season):
            for episode in episodes_by_season[season]:
                index = 0
                for s, scene in enumerate(episode["scenes"]):
                    for i, utt in enumerate(scene["utterances"]):
                        if scene["note_at"] == i:
                            handle.write(json.dumps({
                                "doc_id": episode["episode_id"], "index": index,
                                "speaker": "", "text": "(walks around)",
                                "is_note": True, "scene_id": s,
                            }) + "\n")
                            index += 1
                        handle.write(json.dumps({
                            "doc_id": episode["episode_id"], "index": index,
                            "speaker": utt["speaker"], "text": utt["text"],
                            "is_note": False, "scene_id": s,
                        }) + "\n")
                        index += 1
    print(f"wrote {path}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--format", choices=("native-jsonl", "character-mining-json"),
                        default="native-jsonl")
    parser.add_argument("--seasons", default="s01,s05,s06,s07,s08,s09,s10",
                        help="comma list of season ids")
    parser.add_argument("--episodes-per-season", type=int, default=3)
    parser.add_argument("--scenes-per-episode", type=int, default=6)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = random.Random(args.seed)
    episodes_by_season = {}
    for season in args.seasons.split(","):
        episodes = []
        for e in range(1, args.episodes_per_season + 1):
            episodes.append(
                make_episode(rng, f"{season}_e{e:02d}", args.scenes_per_episode)
            )
        episodes_by_season[season] = episodes

    out_dir = Path(args.out)
    if args.format == "character-mining-json":
        write_character_mining(episodes_by_season, out_dir)
    else:
        write_native(episodes_by_season, out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
