from ..Schema.UnifiedSchema import serialize_schema

INSTRUCTION = (
    "Task: {task}\n"
    "Schema: {schema}\n"
    "Text: {x}\n"
    "Extract every record defined by the schema from the text and output a JSON list of records."
)
REASONING_SUFFIX = "\nThink inside <think></think> first, then give the JSON answer."
STRATEGY_PREFIX = "Strategy: {strategy}\n\n"
# 策略隐藏样本的指令
SKIP_REASONING = "Skip all reasoning steps and leave the think block empty."


def base_prompt(x, s):
    return INSTRUCTION.format(task=s.task.value, schema=serialize_schema(s), x=x)


def build_prompt(x, s, strategy=None, reasoning=True):
    """
    Args:
        strategy: 前缀到输入前的 strategy 文本（Strategy Prefix Injection）
        reasoning: False 时是不带推理的基础指令数据
    """
    prompt = base_prompt(x, s)
    if reasoning:
        prompt += REASONING_SUFFIX
    if strategy:
        prompt = STRATEGY_PREFIX.format(strategy=strategy) + prompt
    return prompt