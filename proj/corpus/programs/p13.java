import java.util.ArrayDeque;
import java.util.Deque;

public class ValidParentheses {
    public static int main(String[] args) {
        String s = "([]{})";
        Deque<Character> stack = new ArrayDeque<>();
        int valid = 1;
        for (char c : s.toCharArray()) {
            if (c == '(' || c == '[' || c == '{') {
                stack.push(c);
            } else {
                if (stack.isEmpty()) {
                    valid = 0;
                    break;
                }
                char open = stack.pop();
                if ((c == ')' && open != '(') || (c == ']' && open != '[') || (c == '}' && open != '{')) {
                    valid = 0;
                }
            }
        }
        if (!stack.isEmpty()) {
            valid = 0;
        }
        return valid;
    }
}
