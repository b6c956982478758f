"""Headless driver: file-in/file-out question generation, drafting,
metrics reporting, and the local service launcher.

Exit codes: 0 ok, 2 input/ingest failure, 3 provider failure,
4 validation/referential failure.
"""

from __future__ import annotations

import json
import socket
import sys
from pathlib import Path

import click

from . import drafting
from .domain import (
    AnswerSet,
    ReplyPreferences,
    Session,
    SessionState,
    QuestionSet,
    check_answers,
)
from .errors import (
    IngestError,
    NothingToSay,
    ProviderError,
    QAReplyError,
    SessionError,
    ValidationIssue,
)
from .gateway import ProviderConfig, make_provider
from .ingest import IngestConfig, parse_json_email, parse_mail_file
from .metrics import per_condition_means, read_csv
from .questions import generate_questions

EXIT_OK = 0
EXIT_INGEST = 2
EXIT_PROVIDER = 3
EXIT_VALIDATION = 4


def _load_email(path: str, as_json: bool, config: IngestConfig):
    data = Path(path).read_bytes()
    if as_json or path.endswith(".json"):
        return parse_json_email(json.loads(data.decode("utf-8")), config)
    return parse_mail_file(data, config)


def _fail(code: int, exc: Exception) -> None:
    click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
    sys.exit(code)


@click.group()
def main():
    """QA-based email reply toolkit."""


@main.command("questions")
@click.option("--email", "email_path", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="treat the email file as JSON")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--provider", type=click.Choice(["mock", "live"]), default="mock")
@click.option("--user-name", default="", help="name of the replying user")
@click.option("--user-address", default="")
@click.option("--locale", default="en")
def cmd_questions(email_path, as_json, out_path, provider, user_name, user_address, locale):
    """Generate anchored questions for an email and write them as JSON."""
    from .domain import UserIdentity

    config = IngestConfig(default_locale=locale)
    try:
        email = _load_email(email_path, as_json, config)
    except (OSError, ValueError, IngestError) as exc:
        _fail(EXIT_INGEST, exc)
    user = UserIdentity(name=user_name, address=user_address, locale=locale)
    try:
        llm = make_provider(provider, ProviderConfig.from_env())
        question_set = generate_questions(email, user, llm)
    except ProviderError as exc:
        _fail(EXIT_PROVIDER, exc)
    except QAReplyError as exc:
        _fail(EXIT_VALIDATION, exc)
    Path(out_path).write_text(
        json.dumps(question_set.to_dict(), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    click.echo(f"wrote {len(question_set.questions)} questions to {out_path}")


@main.command("draft")
@click.option("--email", "email_path", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
@click.option("--questions", "questions_path", required=True, type=click.Path())
@click.option("--answers", "answers_path", required=True, type=click.Path())
@click.option("--prefs", "prefs_path", type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--provider", type=click.Choice(["mock", "live"]), default="mock")
@click.option("--user-name", default="")
@click.option("--user-address", default="")
def cmd_draft(email_path, as_json, questions_path, answers_path, prefs_path, out_path,
              provider, user_name, user_address):
    """Synthesize a reply draft from questions, answers, and preferences."""
    from .domain import UserIdentity

    try:
        email = _load_email(email_path, as_json, IngestConfig())
        question_set = QuestionSet.from_dict(
            json.loads(Path(questions_path).read_text(encoding="utf-8"))
        )
        answers_raw = json.loads(Path(answers_path).read_text(encoding="utf-8"))
        answers = AnswerSet.from_dict(
            answers_raw if isinstance(answers_raw, dict) else {"answers": answers_raw}
        )
        prefs = (
            ReplyPreferences.from_dict(
                json.loads(Path(prefs_path).read_text(encoding="utf-8"))
            )
            if prefs_path
            else ReplyPreferences()
        )
    except (OSError, ValueError, IngestError) as exc:
        _fail(EXIT_INGEST, exc)

    session = Session(
        id="cli",
        email=email,
        user=UserIdentity(name=user_name, address=user_address),
        question_set=question_set,
        answers=answers,
        preferences=prefs,
        state=SessionState.QUESTIONED,
    )
    try:
        check_answers(answers, question_set)
    except SessionError as exc:
        _fail(EXIT_VALIDATION, exc)
    try:
        llm = make_provider(provider, ProviderConfig.from_env())
        draft = drafting.generate_draft(session, llm)
    except ProviderError as exc:
        _fail(EXIT_PROVIDER, exc)
    except (NothingToSay, ValidationIssue) as exc:
        _fail(EXIT_VALIDATION, exc)
    Path(out_path).write_text(draft.text, encoding="utf-8")
    click.echo(f"prompt digest: {draft.prompt_digest}")
    click.echo(f"wrote draft to {out_path}")


@main.command("metrics")
@click.option("--records", "records_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["json", "pretty"]), default="pretty")
def cmd_metrics(records_path, fmt):
    """Per-condition means of efficiency and typed prompt characters."""
    try:
        records = read_csv(Path(records_path).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError) as exc:
        _fail(EXIT_INGEST, exc)
    report = per_condition_means(records)
    if fmt == "json":
        click.echo(json.dumps(report, indent=2, sort_keys=True))
    else:
        if not report:
            click.echo("no records")
        for cond in sorted(report):
            r = report[cond]
            click.echo(
                f"{cond}: n={int(r['n'])} "
                f"mean_efficiency={r['mean_efficiency']:.4f} chars/s "
                f"mean_prompt_chars={r['mean_prompt_char_count']:.1f}"
            )


@main.command("serve")
@click.option("--port", default=8000, type=int)
@click.option("--host", default="127.0.0.1")
@click.option("--provider", type=click.Choice(["mock", "live"]), default="mock")
@click.option("--cors-origin", "cors_origins", multiple=True, default=("*",))
@click.option("--ttl-seconds", default=86400, type=int)
def cmd_serve(port, host, provider, cors_origins, ttl_seconds):
    """Run the session service until interrupted."""
    import uvicorn

    from .service import SessionStore, create_app

    # fail fast with our exit code instead of a uvicorn stack trace
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        probe.close()
        _fail(EXIT_INGEST, exc)
    probe.close()

    llm = make_provider(provider, ProviderConfig.from_env())
    store = SessionStore(ttl_seconds=ttl_seconds)
    app = create_app(llm, store, cors_origins=tuple(cors_origins))
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    finally:
        store.clear()  # ephemeral: drop all content on shutdown


if __name__ == "__main__":
    main()
