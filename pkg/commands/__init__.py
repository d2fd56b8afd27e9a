from commands.analysis import handle_exact, handle_invert_lamb, handle_predict
from commands.curves import handle_p0, handle_ratemodel
from commands.simulate import handle_simulate

COMMANDS = {
    "predict": handle_predict,
    "exact": handle_exact,
    "simulate": handle_simulate,
    "ratemodel": handle_ratemodel,
    "invert-lamb": handle_invert_lamb,
    "p0": handle_p0,
}
