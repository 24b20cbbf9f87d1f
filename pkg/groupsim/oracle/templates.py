"""Prompt templates.

Placeholders are ``{lower_case_name}``. Doubled braces render as single
literal braces, so answer formats can show ``{predicted_views}`` without
turning it into a slot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Union

from ..core.exceptions import MissingSlot


class TemplateName(str, Enum):
    GROUP_FIND = "group_find"
    GROUP_GENERATE = "group_generate"
    DECISION = "decision"
    EMOTION_UPDATE = "emotion_update"
    ENGAGEMENT_PREDICT = "engagement_predict"
    CLASSIFY = "classify"
    PREDICT = "predict"


_TOKEN = re.compile(r"\{\{|\}\}|\{([a-z_]+)\}")


@dataclass(frozen=True)
class PromptTemplate:
    name: TemplateName
    text: str

    @property
    def slots(self) -> tuple[str, ...]:
        """Slot names in order of first appearance."""
        ordered: dict[str, None] = {}
        for match in _TOKEN.finditer(self.text):
            if match.group(1):
                ordered.setdefault(match.group(1), None)
        return tuple(ordered)

    def render(self, context: Mapping[str, Any]) -> str:
        for slot in self.slots:
            if slot not in context or context[slot] is None:
                raise MissingSlot(slot, self.name.value)

        def _substitute(match: re.Match[str]) -> str:
            token = match.group(0)
            if token == "{{":
                return "{"
            if token == "}}":
                return "}"
            return str(context[match.group(1)])

        return _TOKEN.sub(_substitute, self.text)


_AGENT_HEADER = """System:
You are {agent_name}, {agent_description}.
You are in the social network world: {world_description}.
perception:
  - Time: {day_n}
  - Event State: {event_state}
Your State:
  - Previous Memory: {memory}
  - Previous State: {previous_state}
"""

GROUP_FIND = """Instructions:
You are an AI assistant specializing in generating hierarchical population group structures \
based on the provided country and domain. Use the given context to create a detailed \
tree-structured hierarchy that includes group names and corresponding numbers at each level.
Domain: {domain}      Country: {country}
Your task is to generate a multi-level hierarchy for population groups, adjusting the \
structure based on the country and domain. Use the following format:
  - First Layer (Domain-level Groups, denoted by ##):
    Broad categories representing the major population groups of the domain in the given field.
  - Second Layer (Subgroups, denoted by 1. ** **):
    Specific subdivisions of each first-layer group.
  - Third Layer (Detailed Breakdown, denoted by -):
    Granular breakdowns within each subgroup.
Example:
For Country: CN (China) and Field: Education, a branch of the tree structure should be like this:
## Students: 58,030,769
  1. **Postgraduates: 3,653,613**
    - Doctor: 556,065
    - Master: 3,097,548
  2. **Undergraduates: 19,656,436**
    - Bachelor: 19,656,436
  3. **Vocational Undergraduate: 34,720,720**
    - Normal: 8,926,980
    - Short-cycle: 25,794,740
"""

GROUP_GENERATE = """Instructions:
You are an AI assistant tasked with generating group agents and your process is as follows:
1. Identify and list all groups mentioned in the document.
2. Based on the identified groups and their associated templates, generate an agent for each \
group, ensuring no duplicates and that all groups are generative.
Answer Format:
  agent {{n}}: (nth agent)
  id: {{group}}-agents
  description: Representing {{number}} {{country}} {{group}}, reflecting their emotions, \
attitudes, and possible actions in response to the news.
  characteristic: {susceptible/ordinary/calm} population
3. Follow the template below strictly, filling in the {{group}}, {{number}}, and {{country}} \
fields based on the contextual input.
Country: {country}
Document:
{document}
"""

DECISION = (
    _AGENT_HEADER
    + """  - Current Emotion: {emotions}
  - Current Attitude: {attitudes}
Action Options:
You can choose from the following available actions: {available_actions}
Instructions:
1. Use decision-making reasoning to choose your actions based on factors such as perception \
and your status. This action must be one of the available actions based on the previous \
context. Also, explain why.
2. Answers must follow the following format:
  Action: {Action name}
  Reason: {{reason}}
  Updated plan: {List available actions with serial numbers}
"""
)

EMOTION_UPDATE = (
    _AGENT_HEADER
    + """  - Emotion Fading: {emotion_fading}
Instructions:
1. Update your emotions and attitudes: Update your emotions and attitudes based on your \
perception and status, taking into account the current time and emotion fading.
2. Event cycle pattern: In a typical event cycle, emotions will initially surge, then quickly \
decline, and eventually stabilize. Some explosive events may have a second emotional peak. \
Attitudes tend to follow a similar pattern.
3. Response Template:
  emotions: { 'happiness': (), 'sadness': (), 'anger': () }
  attitudes: { 'optimism': (), 'pessimism': () }
Fill every () with a number between 0 and 1.
"""
)

ENGAGEMENT_PREDICT = (
    _AGENT_HEADER
    + """  - Forgetting Probability: {forgetting_probability}
  - Current Emotion: {emotions}
  - Current Attitude: {attitudes}
  - Group Size: {population}
Instructions:
Task: Predict daily engagement metrics
1. Daily reading forecast:
  - Based on your perception and status, consider the popularity of the event, the current \
date, and the forgetting probability, and estimate how many people in your group have viewed \
the event.
2. General engagement pattern:
  - Views:
    - Must be at least one order of magnitude higher than likes.
    - Due to the forgetfulness effect, views gradually diminish over time, and explosive events \
may have a second peak of views, but less than the first peak of views.
  - Likes, comments, and shares:
    - Likes usually exceed comments and shares.
    - For news that sparks heated discussions, comments or shares may exceed likes.
3. Forecast format:
  Date: {date}
  Views: {{predicted_views}}
  Likes: {{predicted_likes}}
  Comments: {{predicted_comments}}
  Shares: {{predicted_shares}}
"""
)

CLASSIFY = """Instructions:
Identify the domain and the country of the following online event.
Title: {title}
Content: {content}
Platform: {platform}
The domain must be one of: {domains}.
The country must be an ISO-3166 alpha-2 code.
Answer format:
Domain: <domain>
Country: <country code>
"""

PREDICT = (
    _AGENT_HEADER
    + """  - Current Emotion: {emotions}
  - Current Attitude: {attitudes}
Instructions:
Project the outcome of the event from the point of view of your group. Choose exactly one of \
the following options: {options}
Answers must follow the following format:
  Prediction: <option>
  Confidence: <number between 0 and 1>
  Reason: {{reason}}
"""
)

TEMPLATES: dict[TemplateName, PromptTemplate] = {
    TemplateName.GROUP_FIND: PromptTemplate(TemplateName.GROUP_FIND, GROUP_FIND),
    TemplateName.GROUP_GENERATE: PromptTemplate(TemplateName.GROUP_GENERATE, GROUP_GENERATE),
    TemplateName.DECISION: PromptTemplate(TemplateName.DECISION, DECISION),
    TemplateName.EMOTION_UPDATE: PromptTemplate(TemplateName.EMOTION_UPDATE, EMOTION_UPDATE),
    TemplateName.ENGAGEMENT_PREDICT: PromptTemplate(
        TemplateName.ENGAGEMENT_PREDICT, ENGAGEMENT_PREDICT
    ),
    TemplateName.CLASSIFY: PromptTemplate(TemplateName.CLASSIFY, CLASSIFY),
    TemplateName.PREDICT: PromptTemplate(TemplateName.PREDICT, PREDICT),
}


def get_template(name: Union[TemplateName, str]) -> PromptTemplate:
    return TEMPLATES[TemplateName(name)]


def render_template(name: Union[TemplateName, str], context: Mapping[str, Any]) -> str:
    return get_template(name).render(context)
