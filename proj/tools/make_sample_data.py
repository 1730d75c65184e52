#!/usr/bin/env python3
"""Regenerates the bundled sample data under data/. Deterministic."""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data"

EN_MED = [
    "The patient presented with fever, productive cough and pleuritic chest pain for three days.",
    "Chest radiography showed a right lower lobe consolidation consistent with bacterial pneumonia.",
    "Empirical treatment with amoxicillin was started after blood cultures were drawn.",
    "Type 2 diabetes is managed first with lifestyle change and metformin unless contraindicated.",
    "Hypertension should be confirmed with ambulatory or home readings before long-term therapy begins.",
    "Renal function and potassium need monitoring after an ACE inhibitor dose increase.",
    "A clinical diagnosis of migraine rests on recurrent headache attacks with typical features.",
    "Warning symptoms such as sudden severe headache or focal weakness require urgent imaging.",
    "Surgery is usually deferred until the infection has been controlled with antibiotics.",
    "The doctor reviewed the medication list and stopped the drug that prolonged the QT interval.",
    "Iron deficiency anaemia in older adults warrants investigation of the gastrointestinal tract.",
    "Children with suspected dehydration are assessed by weight loss, mucous membranes and capillary refill.",
]
EN_GEN = [
    "The city council approved a new budget for road repairs and public libraries this spring.",
    "Volunteers planted several hundred trees along the river during a weekend community event.",
    "The museum opened an exhibition of early printed maps borrowed from collections abroad.",
    "Local farmers reported a late harvest because of unusually cold weather in the autumn.",
    "A new bus route now links the university campus with the railway station every twenty minutes.",
    "The orchestra rehearsed a programme of chamber works before its regional tour next month.",
    "Engineers inspected the old bridge and recommended replacing several corroded steel beams.",
    "The school introduced an after-class coding club that meets twice a week in the library.",
]
ZH_MED = [
    "患者男性，六十五岁，反复胸闷气短两年，加重一周入院。",
    "查体血压一百六十比九十五毫米汞柱，双下肢轻度水肿。",
    "心电图提示窦性心律，左心室肥厚，考虑高血压性心脏病。",
    "给予利尿剂和血管紧张素转换酶抑制剂治疗，症状明显缓解。",
    "糖尿病患者应定期监测血糖和糖化血红蛋白，并注意足部护理。",
    "医生建议患者低盐饮食，适量运动，戒烟限酒，按时服药。",
    "急性阑尾炎确诊后一般需要尽早手术，以免发生穿孔和腹腔感染。",
    "儿童发热伴皮疹时应注意鉴别麻疹、风疹和幼儿急疹等疾病。",
    "临床上对于慢性咳嗽，需要排查哮喘、胃食管反流和鼻后滴漏综合征。",
    "使用抗凝药物期间应监测凝血功能，警惕出血倾向。",
]
ZH_GEN = [
    "今年春天，市图书馆新增了一批儿童绘本和地方史料。",
    "周末的社区运动会吸引了许多家庭参加，现场气氛十分热烈。",
    "新开通的地铁线路连接了大学城和高铁站，方便了出行。",
    "博物馆推出了古代书画特展，展期持续到年底。",
    "农民们趁着晴好天气抢收晚稻，田间一片忙碌景象。",
    "学校开设了课后编程兴趣班，每周活动两次。",
]

PII_SNIPPETS = [
    "Contact the clinic at 138-0000-0000 for the follow-up appointment.",
    "Send the scan results to patient.records@example.com before Friday.",
    "请拨打13912345678联系主治医生。",
    "Call (415) 555-0132 to reschedule the surgery.",
]
TOXIC = ["You are a worthless idiot and nobody should treat you.", "那个医生就是个白痴，根本不会看病。"]
BENCH_QUESTION = ("Which of the following drugs is the first-line treatment for type 2 diabetes in adults "
                  "without contraindications according to current guidelines")


def paragraph(rng, pool, n):
    return " ".join(rng.sample(pool, n)) if pool[0].isascii() else "".join(rng.sample(pool, n))


def corpus():
    rng = random.Random(20240601)
    docs = []
    i = 0

    def add(lang, source, text):
        nonlocal i
        i += 1
        docs.append({"id": f"doc-{i:04d}", "lang": lang, "source": source, "text": text})

    for _ in range(60):
        add("en", "web_medical", paragraph(rng, EN_MED, rng.randint(3, 6)))
    for _ in range(40):
        add("zh", "web_medical", paragraph(rng, ZH_MED, rng.randint(3, 6)))
    for _ in range(25):
        add("en", "web_general", paragraph(rng, EN_GEN, rng.randint(3, 5)))
    for _ in range(15):
        add("zh", "web_general", paragraph(rng, ZH_GEN, rng.randint(3, 5)))
    # too short
    for _ in range(12):
        add(rng.choice(["en", "zh"]), "web_medical", rng.choice(["Take two tablets.", "多喝水。", "See a doctor."]))
    # PII
    for k in range(10):
        add("en", "forum", paragraph(rng, EN_MED, 3) + " " + PII_SNIPPETS[k % len(PII_SNIPPETS)])
    # toxic
    for k in range(6):
        add("en", "forum", paragraph(rng, EN_MED, 3) + " " + TOXIC[k % len(TOXIC)])
    # symbol noise
    for _ in range(6):
        add("en", "web_medical", paragraph(rng, EN_MED, 4) + " " + "#$@~^*|<>{}=+" * 40)
    # repetitive, low quality
    for _ in range(10):
        add("en", "web_medical", "patient patient treatment treatment " * 20)
    # duplicates with whitespace differences
    originals = [d for d in docs[:60]]
    for k in range(10):
        src = originals[k * 5]
        add(src["lang"], src["source"], "  " + src["text"].replace(" ", "  ") + "\n")
    # contaminated with a benchmark question
    for _ in range(6):
        add("en", "exam_prep", paragraph(rng, EN_MED, 2) + " " + BENCH_QUESTION + " and why?")
    assert len(docs) == 200, len(docs)
    rng.shuffle(docs)
    return docs


def sft_manifest():
    # 100 dialogues, 86 zh / 14 en, four categories.
    out = []
    layout = [("single_turn_QA_ch", "zh", 1, 40), ("multi_turn_QA_ch", "zh", 3, 30),
              ("single_turn_option_ch", "zh", 1, 16), ("single_turn_QA_en", "en", 1, 14)]
    n = 0
    for category, lang, exchanges, count in layout:
        for _ in range(count):
            n += 1
            turns = []
            for e in range(exchanges):
                if lang == "zh":
                    turns.append({"role": "user", "text": f"医生您好，我的第{e + 1}个问题：{ZH_MED[(n + e) % len(ZH_MED)]}这需要注意什么？"})
                    turns.append({"role": "assistant", "text": ZH_MED[(n + e + 3) % len(ZH_MED)] + ZH_MED[(n + e + 5) % len(ZH_MED)]})
                else:
                    turns.append({"role": "user", "text": f"Question {e + 1}: {EN_MED[(n + e) % len(EN_MED)]} What should I do?"})
                    turns.append({"role": "assistant", "text": EN_MED[(n + e + 3) % len(EN_MED)] + " " + EN_MED[(n + e + 5) % len(EN_MED)]})
            out.append({"id": f"sft-{n:03d}", "lang": lang, "source": category, "turns": turns})
    return out


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    write_jsonl(OUT / "synthetic_corpus.jsonl", corpus())
    manifest = sft_manifest()
    write_jsonl(OUT / "sft_dialogues.jsonl", [{k: v for k, v in d.items() if k != "source"} for d in manifest])
    write_jsonl(OUT / "sft_manifest.jsonl",
                [{"id": d["id"], "lang": d["lang"], "source": d["source"],
                  "text": "\n".join(t["text"] for t in d["turns"])} for d in manifest])
    (OUT / "benchmark_questions.txt").write_text(BENCH_QUESTION + "?\n", encoding="utf-8")
    (OUT / "toxic_lexicon.txt").write_text("idiot\nworthless\n白痴\n", encoding="utf-8")


if __name__ == "__main__":
    main()
