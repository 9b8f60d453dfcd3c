"""
Решатели: обыкновенные уравнения, потоки, уравнения в частных производных первого и второго порядка, стохастические уравнения
"""

__all__ = ['ode_core', 'flows', 'first_order_pde', 'second_order_pde', 'stochastic']
