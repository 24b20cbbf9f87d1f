"""Prompt templates, reply grammars and the oracle implementations."""

from .base import Oracle, OracleReply, OracleRequest
from .gateway import AgentView, OracleGateway, agent_context
from .remote import RemoteOracle
from .replies import (
    parse_classification,
    parse_decision,
    parse_emotions,
    parse_engagement,
    parse_group_generate,
    parse_prediction,
)
from .stub import StubOracle, characteristic_for_group
from .templates import TEMPLATES, PromptTemplate, TemplateName, get_template, render_template

__all__ = [
    "Oracle",
    "OracleRequest",
    "OracleReply",
    "OracleGateway",
    "AgentView",
    "agent_context",
    "RemoteOracle",
    "StubOracle",
    "characteristic_for_group",
    "TemplateName",
    "PromptTemplate",
    "TEMPLATES",
    "get_template",
    "render_template",
    "parse_classification",
    "parse_decision",
    "parse_emotions",
    "parse_engagement",
    "parse_group_generate",
    "parse_prediction",
]
