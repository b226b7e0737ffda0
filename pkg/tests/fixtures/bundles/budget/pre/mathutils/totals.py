def running_total(values):
    return sum(values)
