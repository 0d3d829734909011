"""Annotating comparison tasks with a remote language model.

The model replaces human annotators under three quality strategies:
every task is submitted twice and kept only if both passes choose the
same option (self-consistency), the model reports a 1-5 confidence and
only the top level is kept (self-assessment), and it must write its
reasoning before the judgment (rationale augmentation). The model never
gets the write-in option.
"""

from __future__ import annotations

import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Protocol

from .comparison import AnnotationTask

OPTION_PATTERN = re.compile(
    r"task\s*(\d+)\s*:\s*rationale\s*:\s*(.*?)\s*\|\s*option\s*:\s*(\d+)"
    r"\s*\|\s*confidence\s*:\s*(\d+)",
    re.IGNORECASE,
)


class ClientTransportError(RuntimeError):
    """The annotation service could not be reached."""


class PromptClient(Protocol):
    """Thin remote-model interface: send one prompt, receive text."""

    def send(self, prompt: str) -> str: ...


class HttpPromptClient:
    """POSTs prompts to a completion endpoint.

    The bearer credential is read from an environment variable so it
    never lands in config files.
    """

    def __init__(self, endpoint: str, api_key_env: str = "QUADSCORER_AI_API_KEY",
                 timeout: float = 60.0):
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.timeout = timeout

    def send(self, prompt: str) -> str:
        import requests

        headers = {}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            resp = requests.post(self.endpoint, json={"prompt": prompt},
                                 headers=headers, timeout=self.timeout)
            resp.raise_for_status()
        except requests.RequestException as exc:
            raise ClientTransportError(str(exc)) from exc
        return resp.json()["text"]


def default_prompt_template() -> str:
    return (resources.files("quadscorer") / "templates" / "ai_annotation_prompt.txt"
            ).read_text(encoding="utf-8")


@dataclass(frozen=True)
class AiAnnotationConfig:
    """Prompting strategy knobs; defaults follow the annotation protocol."""

    prompt_template: str = field(default_factory=default_prompt_template)
    guidelines: str = ""
    demonstrations: str = ""
    samples_per_prompt: int = 4
    confidence_floor: int = 5
    passes: int = 2
    parallelism: int = 1

    def __post_init__(self) -> None:
        if self.samples_per_prompt < 1:
            raise ValueError("samples_per_prompt must be >= 1")
        if not 1 <= self.confidence_floor <= 5:
            raise ValueError("confidence_floor must be in 1..5")


@dataclass(frozen=True)
class AiJudgment:
    """A kept model judgment; option 5 (write-in) is never available."""

    task_id: str
    option: int
    rationale: str
    confidence: int
    pass_index: int = 1

    def __post_init__(self) -> None:
        if self.option == 5:
            raise ValueError("AI judgments cannot choose the write-in option")


def render_prompt(tasks: list[AnnotationTask], config: AiAnnotationConfig) -> str:
    blocks = []
    for i, task in enumerate(tasks, start=1):
        options = [f"  option {j}: {c.label.text}"
                   for j, c in enumerate(task.candidates, start=1)]
        options.append("  option 6: the sentence expresses no (inferable) sentiment")
        blocks.append(f"task {i}\nsentence: {task.review.text}\n" + "\n".join(options))
    return config.prompt_template.format(
        guidelines=config.guidelines,
        demonstrations=config.demonstrations,
        tasks="\n\n".join(blocks),
    )


def parse_response(text: str, tasks: list[AnnotationTask]) -> dict[str, tuple]:
    """Extract (option, rationale, confidence) per task id; drops garbage."""
    out: dict[str, tuple] = {}
    for match in OPTION_PATTERN.finditer(text):
        index, rationale, option, confidence = match.groups()
        index, option, confidence = int(index), int(option), int(confidence)
        if not 1 <= index <= len(tasks):
            continue
        task = tasks[index - 1]
        valid_options = set(range(1, len(task.candidates) + 1)) | {6}
        if option not in valid_options or not 1 <= confidence <= 5:
            continue
        out[task.task_id] = (option, rationale.strip(), confidence)
    return out


def _send_with_retry(client: PromptClient, prompt: str, retries: int,
                     backoff: float) -> str:
    for attempt in range(retries + 1):
        try:
            return client.send(prompt)
        except ClientTransportError:
            if attempt == retries:
                raise
            time.sleep(backoff * (2 ** attempt))
    raise AssertionError("unreachable")


def annotate_batch(client: PromptClient, tasks, config: AiAnnotationConfig,
                   retries: int = 3, backoff: float = 1.0
                   ) -> tuple[list[AiJudgment], int]:
    """Annotate tasks with the remote model, applying all quality gates.

    Returns the kept judgments (first-pass rationale, confirmed option)
    and the count of rejected tasks. A task is rejected when either pass
    is missing or malformed, the passes disagree on the option, or
    either confidence falls below ``config.confidence_floor``.
    """
    tasks = list(tasks)
    groups = [tasks[i:i + config.samples_per_prompt]
              for i in range(0, len(tasks), config.samples_per_prompt)]
    jobs = [(group, pass_index)
            for group in groups
            for pass_index in range(1, config.passes + 1)]

    def run(job):
        group, pass_index = job
        response = _send_with_retry(client, render_prompt(group, config),
                                    retries, backoff)
        return group, pass_index, parse_response(response, group)

    if config.parallelism > 1:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]

    by_task: dict[str, dict[int, tuple]] = {}
    for group, pass_index, parsed in results:
        for task_id, judgment in parsed.items():
            by_task.setdefault(task_id, {})[pass_index] = judgment

    kept: list[AiJudgment] = []
    rejected = 0
    for task in tasks:
        passes = by_task.get(task.task_id, {})
        if len(passes) < config.passes:
            rejected += 1
            continue
        options = {p[0] for p in passes.values()}
        confidences = [p[2] for p in passes.values()]
        if len(options) != 1 or any(c < config.confidence_floor for c in confidences):
            rejected += 1
            continue
        option, rationale, confidence = passes[1]
        kept.append(AiJudgment(task_id=task.task_id, option=option,
                               rationale=rationale, confidence=confidence,
                               pass_index=1))
    return kept, rejected


# -- agreement ----------------------------------------------------------

@dataclass(frozen=True)
class AgreementReport:
    kappa: float
    accuracy: float  # percent
    n_tasks: int


def cohen_kappa(labels_a, labels_b) -> float:
    """Chance-corrected agreement between two aligned label sequences."""
    labels_a, labels_b = list(labels_a), list(labels_b)
    if len(labels_a) != len(labels_b) or not labels_a:
        raise ValueError("label sequences must be non-empty and aligned")
    n = len(labels_a)
    categories = sorted(set(labels_a) | set(labels_b))
    index = {c: i for i, c in enumerate(categories)}
    table = [[0] * len(categories) for _ in categories]
    for a, b in zip(labels_a, labels_b):
        table[index[a]][index[b]] += 1
    p_o = sum(table[i][i] for i in range(len(categories))) / n
    row = [sum(table[i]) / n for i in range(len(categories))]
    col = [sum(table[i][j] for i in range(len(categories))) / n
           for j in range(len(categories))]
    p_e = sum(r * c for r, c in zip(row, col))
    if p_e == 1.0:
        return 1.0  # both labelers constant on the same category
    return (p_o - p_e) / (1.0 - p_e)


def agreement_metrics(ai_resolutions: dict[str, int],
                      human_resolutions: dict[str, int],
                      include_p6: bool = True) -> AgreementReport:
    """Kappa and accuracy between AI and human options on shared tasks.

    With ``include_p6=False``, tasks where either side chose option 6
    are removed before computing the metrics.
    """
    shared = sorted(set(ai_resolutions) & set(human_resolutions))
    if not include_p6:
        shared = [t for t in shared
                  if ai_resolutions[t] != 6 and human_resolutions[t] != 6]
    if not shared:
        raise ValueError("no shared tasks between the two resolution sets")
    a = [ai_resolutions[t] for t in shared]
    b = [human_resolutions[t] for t in shared]
    accuracy = 100.0 * sum(x == y for x, y in zip(a, b)) / len(shared)
    return AgreementReport(kappa=cohen_kappa(a, b), accuracy=accuracy,
                           n_tasks=len(shared))
